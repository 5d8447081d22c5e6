//! Free resolutions of presented groups and homological resolutions
//! `φ: C → A` of bounded complexes.
//!
//! Row `j` of `C` is a free resolution of `H^j(A)` under `d¹`; the higher
//! components `d^r`, `r ≥ 2`, and the map components `φ^r: C^{−r,*} → A^{*−r}`
//! are built column by column so that `Tot(φ)` is a quasi-isomorphism.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{homology_at, is_quasi_iso, validate_complex, ChainComplex, HomologyData};
use crate::linalg::{
    cokernel_group, smith_normal_form, solve_linear, unimodular_inverse, FgAbGroup, GroupMorphism,
    IntMatrix,
};
use crate::multicomplex::{
    check_mc_map, embed_complex, is_homological, total_map, validate_multicomplex, Components,
    Multicomplex, MulticomplexMap, MulticomplexViolation,
};
use crate::random::{conjugate_complex, elementary_complex};
use crate::{Error, Result};

/// A free resolution `… → C^{−1} →d¹ C^0 →ρ H` of a presented group, stored
/// as a complex in degrees `≤ 0` together with the augmentation `ρ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedRowResolution {
    row: i64,
    complex: ChainComplex,
    rho: GroupMorphism,
}

impl AugmentedRowResolution {
    pub fn new(row: i64, complex: ChainComplex, rho: GroupMorphism) -> Result<Self> {
        if complex.ranks().keys().any(|&i| i > 0) {
            return Err(Error::InvalidInput(
                "row resolution has a positive column".into(),
            ));
        }
        if rho.source().generator_count() != complex.rank(0) || !rho.source().relations().is_zero()
        {
            return Err(Error::DimensionMismatch(
                "augmentation must start at the free group on column 0".into(),
            ));
        }
        Ok(AugmentedRowResolution { row, complex, rho })
    }

    pub fn row(&self) -> i64 {
        self.row
    }

    /// The row as a complex indexed by column.
    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn rank(&self, column: i64) -> usize {
        self.complex.rank(column)
    }

    /// `d¹: C^{i} → C^{i+1}`.
    pub fn d1(&self, column: i64) -> Cow<'_, IntMatrix> {
        self.complex.diff(column)
    }

    pub fn rho(&self) -> &GroupMorphism {
        &self.rho
    }

    /// The resolved group.
    pub fn group(&self) -> &FgAbGroup {
        self.rho.target()
    }

    /// Lowest column with nonzero rank, or 0 for an empty row.
    pub fn lowest_column(&self) -> i64 {
        self.complex.support().map_or(0, |(lo, _)| lo.min(0))
    }

    /// Number of columns `lowest..=0`.
    pub fn length(&self) -> usize {
        (1 - self.lowest_column()) as usize
    }

    /// `d¹d¹ = 0`, exactness at every negative column, and `ρ` inducing an
    /// isomorphism `coker(d¹: C^{−1} → C^0) ≅ H`.
    pub fn is_valid(&self) -> bool {
        if !validate_complex(&self.complex).is_empty() {
            return false;
        }
        let exact =
            (self.lowest_column()..0).all(|i| homology_at(&self.complex, i).group.is_trivial());
        let Ok(top) = FgAbGroup::new(self.rank(0), self.d1(-1).into_owned()) else {
            return false;
        };
        let augmentation = GroupMorphism::new(top, self.group().clone(), self.rho.matrix().clone());
        exact && augmentation.and_then(|m| m.is_iso()).unwrap_or(false)
    }

    fn with_row(mut self, row: i64) -> Self {
        self.row = row;
        self
    }
}

/// The minimal free resolution `0 → ℤ^s →d¹ ℤ^r → G → 0`.
///
/// Diagonalizing the relations `U R V = S` splits off the unit invariant
/// factors; the remaining generators `U⁻¹ e_t, …` give `ρ`, and `d¹` is the
/// nonunit part of `S`.
pub fn free_resolution(g: &FgAbGroup) -> AugmentedRowResolution {
    let n = g.generator_count();
    let smith = smith_normal_form(g.relations());
    let diagonal = smith.diagonal();
    let units = diagonal.iter().take_while(|d| **d == 1.into()).count();
    let top = n - units;
    let bottom = diagonal.len() - units;
    let u_inv = unimodular_inverse(&smith.u).expect("Smith transforms are unimodular");
    let rho_matrix = u_inv.select_columns(units..n);
    let mut d1 = IntMatrix::zeros(top, bottom);
    for (a, d) in diagonal[units..].iter().enumerate() {
        d1.set(a, a, d.clone());
    }
    let complex = ChainComplex::new([(-1, bottom), (0, top)].into(), [(-1, d1)].into())
        .expect("shapes agree");
    let rho = GroupMorphism::new(FgAbGroup::free(top), g.clone(), rho_matrix)
        .expect("generators of a free group map anywhere");
    AugmentedRowResolution {
        row: 0,
        complex,
        rho,
    }
}

/// Adds `extra` columns below the lowest one. Each new column `c` carries an
/// elementary piece `ℤ^k →id ℤ^k` into column `c + 1`; afterwards every
/// column is conjugated by a random unimodular matrix. The random choices are
/// seeded by the row index, so padding is reproducible.
pub fn pad_resolution(r: &AugmentedRowResolution, extra: usize) -> AugmentedRowResolution {
    if extra == 0 {
        return r.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x7061_6464 ^ (r.row as u64).wrapping_mul(0x9e37_79b9));
    let lowest = r.lowest_column();
    let mut pieces = Vec::new();
    for step in 1..=extra as i64 {
        let k = rand::Rng::gen_range(&mut rng, 1..=2);
        pieces.extend(std::iter::repeat_n((lowest - step, Some(1)), k));
    }
    let padded = r.complex.direct_sum(&elementary_complex(&pieces));
    let (complex, iso) = conjugate_complex(&mut rng, &padded);
    let mut rho_matrix = IntMatrix::zeros(r.rho.matrix().rows(), padded.rank(0));
    rho_matrix.set_block(0, 0, r.rho.matrix());
    let u0_inv = unimodular_inverse(&iso.component(0)).expect("conjugation is unimodular");
    let rho = GroupMorphism::new(
        FgAbGroup::free(complex.rank(0)),
        r.group().clone(),
        &rho_matrix * &u0_inv,
    )
    .expect("shapes agree");
    AugmentedRowResolution {
        row: r.row,
        complex,
        rho,
    }
}

/// A homological multicomplex `C` with a map `φ: C → A` whose totalization
/// is a quasi-isomorphism; row `j` of `C` resolves `H^j(A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologicalResolution {
    complex: ChainComplex,
    resolution: Multicomplex,
    phi: MulticomplexMap,
    rows: BTreeMap<i64, AugmentedRowResolution>,
}

impl HomologicalResolution {
    /// Assembles a resolution from stored parts without verifying it; use
    /// [`verify_resolution`] to check the result.
    pub fn from_parts(
        complex: ChainComplex,
        resolution: Multicomplex,
        phi: MulticomplexMap,
        rows: BTreeMap<i64, AugmentedRowResolution>,
    ) -> Result<Self> {
        if phi.source() != &resolution || phi.target() != &embed_complex(&complex) {
            return Err(Error::InvalidInput(
                "φ must map the resolution to the embedded complex".into(),
            ));
        }
        Ok(HomologicalResolution {
            complex,
            resolution,
            phi,
            rows,
        })
    }

    pub fn into_parts(
        self,
    ) -> (
        ChainComplex,
        Multicomplex,
        MulticomplexMap,
        BTreeMap<i64, AugmentedRowResolution>,
    ) {
        (self.complex, self.resolution, self.phi, self.rows)
    }

    /// The resolved complex `A`.
    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    /// The multicomplex `C`.
    pub fn multicomplex(&self) -> &Multicomplex {
        &self.resolution
    }

    pub fn phi(&self) -> &MulticomplexMap {
        &self.phi
    }

    pub fn rows(&self) -> &BTreeMap<i64, AugmentedRowResolution> {
        &self.rows
    }

    pub fn row(&self, j: i64) -> Option<&AugmentedRowResolution> {
        self.rows.get(&j)
    }
}

fn block(comps: &Components, k: i64, i: i64, j: i64, rows: usize, cols: usize) -> IntMatrix {
    comps
        .get(k, i, j)
        .cloned()
        .unwrap_or_else(|| IntMatrix::zeros(rows, cols))
}

struct Builder<'a> {
    a: &'a ChainComplex,
    ranks: BTreeMap<(i64, i64), usize>,
    rows: BTreeMap<i64, AugmentedRowResolution>,
    homology: BTreeMap<i64, HomologyData>,
    d: Components,
    phi: Components,
    rng: ChaCha8Rng,
}

impl Builder<'_> {
    fn rank(&self, i: i64, j: i64) -> usize {
        self.ranks.get(&(i, j)).copied().unwrap_or(0)
    }

    fn homology(&mut self, j: i64) -> &HomologyData {
        let a = self.a;
        self.homology.entry(j).or_insert_with(|| homology_at(a, j))
    }

    fn d_block(&self, r: i64, i: i64, j: i64) -> IntMatrix {
        block(
            &self.d,
            r,
            i,
            j,
            self.rank(i + r, j - r + 1),
            self.rank(i, j),
        )
    }

    fn phi_block(&self, k: i64, s: i64, t: i64) -> IntMatrix {
        block(&self.phi, k, s, t, self.a.rank(t - k), self.rank(s, t))
    }

    fn rho(&self, j: i64) -> Option<&IntMatrix> {
        self.rows.get(&j).map(|r| r.rho.matrix())
    }

    /// Adds a seeded random cocycle-valued map to a freshly solved `φ^k` on
    /// `C^{c,j}` when row `j` continues below column `c`. Particular
    /// solutions are linear in the right-hand side, which would force every
    /// obstruction `φ^k d¹` to vanish; the shift keeps `d_A φ^k` unchanged.
    fn shift_by_cocycles(&mut self, k: i64, c: i64, j: i64, x: IntMatrix) -> IntMatrix {
        let continues = self.rows.get(&j).is_some_and(|r| r.lowest_column() < c);
        if !continues {
            return x;
        }
        let z = self.homology(j - k).cocycle_basis.clone();
        let m = crate::random::random_matrix(&mut self.rng, z.cols(), x.cols(), 1);
        &x + &(&z * &m)
    }

    fn sources_in_column(&self, column: i64) -> Vec<(i64, usize)> {
        self.ranks
            .iter()
            .filter(|(&(i, _), _)| i == column)
            .map(|(&(_, j), &r)| (j, r))
            .collect()
    }

    /// `φ^0 = Z ρ` on column 0 and `φ^1` solving `d_A φ^1 = φ^0 d¹` on column −1.
    fn base_case(&mut self) -> Result<()> {
        let row_indices: Vec<i64> = self.rows.keys().copied().collect();
        for j in row_indices {
            let z = self.homology(j).cocycle_basis.clone();
            let phi0 = &z * self.rho(j).expect("row exists");
            self.phi.insert(0, 0, j, phi0);
        }
        for (j, _) in self.sources_in_column(-1) {
            let rhs = &self.phi_block(0, 0, j) * &self.d_block(1, -1, j);
            let x = solve_linear(&self.a.diff(j - 1), &rhs)?
                .ok_or_else(|| Error::Internal(format!("φ⁰d¹ is not a coboundary in row {j}")))?;
            let x = self.shift_by_cocycles(1, -1, j, x);
            self.phi.insert(1, -1, j, x);
        }
        Ok(())
    }

    /// Defines `d^{n+1}` on every column `≤ −n−1` and `φ^{n+1}` on column `−n−1`.
    fn step(&mut self, n: i64, lowest: i64) -> Result<()> {
        let c = -n - 1;
        let mut obstructions = Vec::new();
        for (j, width) in self.sources_in_column(c) {
            // w = Σ_{r=1..n} φ^{n+1−r} d^r on C^{c,j}, landing in A^{j−n}
            let mut w = IntMatrix::zeros(self.a.rank(j - n), width);
            for r in 1..=n {
                let d = self.d_block(r, c, j);
                let f = self.phi_block(n + 1 - r, c + r, j - r + 1);
                w = &w + &(&f * &d);
            }
            if !(&*self.a.diff(j - n) * &w).is_zero() {
                return Err(Error::Internal(format!(
                    "obstruction on C^{{{c},{j}}} is not a cocycle"
                )));
            }
            let target_row = j - n;
            let h = self.homology(target_row).clone();
            let coords = h.cocycle_coordinates(&w)?;
            let r0 = self.rank(0, target_row);
            let rho = self
                .rho(target_row)
                .cloned()
                .unwrap_or_else(|| IntMatrix::zeros(h.cocycle_basis.cols(), 0));
            let system = IntMatrix::hstack(coords.rows(), &[&rho, h.group.relations()]);
            let y = solve_linear(&system, &-&coords)?.ok_or_else(|| {
                Error::Internal(format!(
                    "ρ-lift of the obstruction on C^{{{c},{j}}} is unsolvable"
                ))
            })?;
            self.d.insert(n + 1, c, j, y.select_rows(0..r0));
            obstructions.push((j, w));
        }

        for i in (lowest..c).rev() {
            for (j, width) in self.sources_in_column(i) {
                let (t, tj) = (i + n + 1, j - n);
                let target_rank = self.rank(t, tj);
                if target_rank == 0 {
                    continue;
                }
                // E = −Σ d^k d^l over k + l = n + 2 with l ≤ n
                let mut e = IntMatrix::zeros(self.rank(t + 1, tj), width);
                for l in 1..=n {
                    let inner = self.d_block(l, i, j);
                    let outer = self.d_block(n + 2 - l, i + l, j - l + 1);
                    e = &e - &(&outer * &inner);
                }
                let cocycle = if t + 1 < 0 {
                    (&self.d_block(1, t + 1, tj) * &e).is_zero()
                } else {
                    let rho = self.rho(tj).expect("column 0 of a nonempty row");
                    let group = self.rows[&tj].group().clone();
                    group.elements_are_zero(&(rho * &e))?
                };
                if !cocycle {
                    return Err(Error::Internal(format!(
                        "extension defect for d^{} on C^{{{i},{j}}} is not a cycle",
                        n + 1
                    )));
                }
                let x = solve_linear(&self.d_block(1, t, tj), &e)?.ok_or_else(|| {
                    Error::Internal(format!("cannot extend d^{} to C^{{{i},{j}}}", n + 1))
                })?;
                self.d.insert(n + 1, i, j, x);
            }
        }

        for (j, w) in obstructions {
            let rhs = &w + &(&self.phi_block(0, 0, j - n) * &self.d_block(n + 1, c, j));
            let x = solve_linear(&self.a.diff(j - n - 1), &rhs)?.ok_or_else(|| {
                Error::Internal(format!("φ^{} on C^{{{c},{j}}} is unsolvable", n + 1))
            })?;
            let x = self.shift_by_cocycles(n + 1, c, j, x);
            self.phi.insert(n + 1, c, j, x);
        }
        Ok(())
    }
}

/// Resolves a bounded complex. `padding[j]` adds that many columns to row `j`.
pub fn homological_resolution(
    a: &ChainComplex,
    padding: &BTreeMap<i64, usize>,
) -> Result<HomologicalResolution> {
    if !validate_complex(a).is_empty() {
        return Err(Error::InvalidInput("input is not a chain complex".into()));
    }
    let mut indices: BTreeSet<i64> = a.ranks().keys().copied().collect();
    indices.extend(padding.iter().filter(|(_, &k)| k > 0).map(|(&j, _)| j));

    let mut builder = Builder {
        a,
        ranks: BTreeMap::new(),
        rows: BTreeMap::new(),
        homology: BTreeMap::new(),
        d: Components::new(1),
        phi: Components::new(0),
        rng: ChaCha8Rng::seed_from_u64(0x7068_6931),
    };
    for j in indices {
        let group = builder.homology(j).group.clone();
        let mut row = free_resolution(&group).with_row(j);
        if let Some(&extra) = padding.get(&j) {
            row = pad_resolution(&row, extra);
        }
        for (&i, &r) in row.complex.ranks() {
            builder.ranks.insert((i, j), r);
        }
        for (&i, m) in row.complex.diffs() {
            builder.d.insert(1, i, j, m.clone());
        }
        builder.rows.insert(j, row);
    }

    builder.base_case()?;
    let lowest = builder.ranks.keys().map(|b| b.0).min().unwrap_or(0);
    let mut n = 1;
    while -n > lowest {
        builder.step(n, lowest)?;
        n += 1;
    }

    let resolution = Multicomplex::from_parts(builder.ranks, builder.d);
    let phi = MulticomplexMap::from_components(resolution.clone(), embed_complex(a), builder.phi);
    Ok(HomologicalResolution {
        complex: a.clone(),
        resolution,
        phi,
        rows: builder.rows,
    })
}

/// Outcome of the independent checks on a resolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionReport {
    pub violations: Vec<MulticomplexViolation>,
    pub homological: bool,
    /// Rows `j` where `coker(d¹: C^{−1,j} → C^{0,j})` is not `H^j(A)`.
    pub row_failures: Vec<i64>,
    pub phi_is_map: bool,
    pub quasi_iso: bool,
}

impl ResolutionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
            && self.homological
            && self.row_failures.is_empty()
            && self.phi_is_map
            && self.quasi_iso
    }
}

/// Re-checks every invariant of a resolution from its stored data alone.
pub fn verify_resolution(res: &HomologicalResolution) -> ResolutionReport {
    let c = &res.resolution;
    let violations = validate_multicomplex(c);
    let complex_ok = validate_complex(&res.complex).is_empty();
    let mut rows: BTreeSet<i64> = res.complex.ranks().keys().copied().collect();
    rows.extend(c.ranks().keys().map(|b| b.1));
    let row_failures = rows
        .into_iter()
        .filter(|&j| {
            let h0 = cokernel_group(&c.component(1, -1, j));
            !complex_ok || !h0.is_isomorphic(&homology_at(&res.complex, j).group)
        })
        .collect();
    let phi_is_map = check_mc_map(&res.phi);
    let total = total_map(&res.phi);
    let quasi_iso = phi_is_map && violations.is_empty() && complex_ok && is_quasi_iso(&total);
    ResolutionReport {
        violations,
        homological: is_homological(c),
        row_failures,
        phi_is_map: phi_is_map && total.is_chain_map(),
        quasi_iso,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kernel_basis;
    use crate::random::random_complex;
    use rand::SeedableRng;

    fn two() -> ChainComplex {
        ChainComplex::from_parts(0, &[1, 1], vec![IntMatrix::from_rows(&[[2]])]).unwrap()
    }

    #[test]
    fn free_resolution_examples() {
        let z2 = FgAbGroup::cyclic(2);
        let r = free_resolution(&z2);
        assert_eq!(*r.d1(-1), IntMatrix::from_rows(&[[2]]));
        assert!(r.is_valid());

        let free = free_resolution(&FgAbGroup::free(3));
        assert_eq!(free.rank(0), 3);
        assert_eq!(free.rank(-1), 0);
        assert!(free.is_valid());

        let g = FgAbGroup::new(2, IntMatrix::from_rows(&[[2], [0]])).unwrap();
        let r = free_resolution(&g);
        assert_eq!((r.rank(0), r.rank(-1)), (2, 1));
        // kernel of d¹ is zero and ρ kills exactly the image of d¹
        assert_eq!(kernel_basis(&r.d1(-1)).cols(), 0);
        assert!(r.is_valid());

        // unit relations are dropped
        let g = FgAbGroup::new(2, IntMatrix::from_rows(&[[1, 0], [1, 3]])).unwrap();
        let r = free_resolution(&g);
        assert_eq!((r.rank(0), r.rank(-1)), (1, 1));
        assert!(r.is_valid());
    }

    #[test]
    fn padding_examples() {
        let r = free_resolution(&FgAbGroup::cyclic(2)).with_row(4);
        assert_eq!(pad_resolution(&r, 0), r);
        let p = pad_resolution(&r, 1);
        assert_eq!(p.lowest_column(), -2);
        assert!(p.is_valid());
        assert_eq!(p, pad_resolution(&r, 1));

        let zero = free_resolution(&FgAbGroup::zero());
        let p = pad_resolution(&zero, 1);
        assert!(p.rank(0) > 0);
        assert!(p.is_valid());
        assert!((p.lowest_column()..=0).all(|i| homology_at(p.complex(), i).group.is_trivial()));
    }

    #[test]
    fn point_resolves_to_itself() {
        let a = ChainComplex::free_in_degree(0, 1);
        let res = homological_resolution(&a, &BTreeMap::new()).unwrap();
        assert_eq!(res.multicomplex().ranks(), &BTreeMap::from([((0, 0), 1)]));
        assert_eq!(*res.phi().component(0, 0, 0), IntMatrix::identity(1));
        assert_eq!(res.multicomplex().r_max(), None);
        assert!(verify_resolution(&res).passed());
    }

    #[test]
    fn zero_differential_gives_column_zero() {
        let a = ChainComplex::from_parts(-1, &[2, 0, 1], vec![]).unwrap();
        let res = homological_resolution(&a, &BTreeMap::new()).unwrap();
        assert!(res.multicomplex().ranks().keys().all(|b| b.0 == 0));
        assert!(res.multicomplex().r_max().is_none_or(|r| r <= 1));
        assert!(verify_resolution(&res).passed());
    }

    #[test]
    fn multiplication_by_two() {
        let res = homological_resolution(&two(), &BTreeMap::new()).unwrap();
        let c = res.multicomplex();
        assert_eq!(c.ranks(), &BTreeMap::from([((-1, 1), 1), ((0, 1), 1)]));
        assert_eq!(*c.component(1, -1, 1), IntMatrix::from_rows(&[[2]]));
        // ρ sends the generator to the class of the generator of A¹
        let phi0 = res.phi().component(0, 0, 1);
        assert_eq!(phi0.get(0, 0).magnitude(), &1u32.into());
        let phi1 = res.phi().component(1, -1, 1);
        assert_eq!(&*two().diff(0) * &*phi1, &*phi0 * &*c.component(1, -1, 1));
        assert!(verify_resolution(&res).passed());
    }

    #[test]
    fn padded_rows_produce_higher_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut seen_d2 = false;
        for _ in 0..40 {
            let a = random_complex(&mut rng, -2, 2, 3);
            let padding = a.ranks().keys().map(|&j| (j, 1)).collect();
            let res = homological_resolution(&a, &padding).unwrap();
            let report = verify_resolution(&res);
            assert!(report.passed(), "{report:?}");
            seen_d2 |= res
                .multicomplex()
                .components()
                .any(|((r, _, _), m)| r == 2 && !m.is_zero());
        }
        assert!(seen_d2);
    }

    #[test]
    fn corrupted_resolutions_fail_without_panicking() {
        let res = homological_resolution(&two(), &[(1, 1)].into()).unwrap();
        let (a, mut c, phi, rows) = res.into_parts();
        let ((r, i, j), _) = c
            .components()
            .find(|(k, m)| k.0 == 1 && !m.is_zero())
            .unwrap();
        *c.component_mut(r, i, j).unwrap().entry_mut(0, 0) += 7;
        let phi = MulticomplexMap::new(
            c.clone(),
            phi.target().clone(),
            phi.components().map(|(k, m)| (k, m.clone())).collect(),
        )
        .unwrap();
        let broken = HomologicalResolution::from_parts(a, c, phi, rows).unwrap();
        assert!(!verify_resolution(&broken).passed());
    }

    #[test]
    fn random_minimal_resolutions_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..40 {
            let a = random_complex(&mut rng, -3, 3, 4);
            let res = homological_resolution(&a, &BTreeMap::new()).unwrap();
            assert!(verify_resolution(&res).passed());
            assert!(res.multicomplex().ranks().keys().all(|b| b.0 >= -1));
        }
    }
}
