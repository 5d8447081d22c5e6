//! Bounded cohomological chain complexes of finitely generated free abelian groups.
//!
//! Degree `j` holds `Z^rank(j)` and the differential `diff(j)` maps degree `j`
//! to degree `j + 1`, so it has shape `rank(j+1) × rank(j)`. Degrees outside
//! the support have rank zero.

use std::borrow::Cow;
use std::collections::BTreeMap;

use crate::linalg::{kernel_basis, solve_linear, FgAbGroup, GroupMorphism, IntMatrix};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ChainComplex {
    ranks: BTreeMap<i64, usize>,
    diffs: BTreeMap<i64, IntMatrix>,
}

impl ChainComplex {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a complex from ranks and differentials keyed by source degree.
    /// Zero ranks and differentials between empty degrees may be omitted.
    pub fn new(ranks: BTreeMap<i64, usize>, diffs: BTreeMap<i64, IntMatrix>) -> Result<Self> {
        let ranks: BTreeMap<i64, usize> = ranks.into_iter().filter(|&(_, r)| r > 0).collect();
        let rank = |j: i64| ranks.get(&j).copied().unwrap_or(0);
        let mut kept = BTreeMap::new();
        for (j, d) in diffs {
            if d.shape() != (rank(j + 1), rank(j)) {
                return Err(Error::DimensionMismatch(format!(
                    "diff({j}) is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    rank(j + 1),
                    rank(j)
                )));
            }
            if d.rows() > 0 && d.cols() > 0 {
                kept.insert(j, d);
            }
        }
        Ok(ChainComplex { ranks, diffs: kept })
    }

    /// Consecutive degrees starting at `lo`; `diffs[k]` is `diff(lo + k)`.
    pub fn from_parts(lo: i64, ranks: &[usize], diffs: Vec<IntMatrix>) -> Result<Self> {
        let ranks = ranks
            .iter()
            .enumerate()
            .map(|(k, &r)| (lo + k as i64, r))
            .collect();
        let diffs = diffs
            .into_iter()
            .enumerate()
            .map(|(k, d)| (lo + k as i64, d))
            .collect();
        Self::new(ranks, diffs)
    }

    /// `Z^rank` concentrated in one degree.
    pub fn free_in_degree(degree: i64, rank: usize) -> Self {
        Self::new([(degree, rank)].into(), BTreeMap::new()).expect("no differentials")
    }

    pub fn rank(&self, j: i64) -> usize {
        self.ranks.get(&j).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &BTreeMap<i64, usize> {
        &self.ranks
    }

    pub fn diff(&self, j: i64) -> Cow<'_, IntMatrix> {
        match self.diffs.get(&j) {
            Some(d) => Cow::Borrowed(d),
            None => Cow::Owned(IntMatrix::zeros(self.rank(j + 1), self.rank(j))),
        }
    }

    /// Stored (nonempty) differentials keyed by source degree.
    pub fn diffs(&self) -> &BTreeMap<i64, IntMatrix> {
        &self.diffs
    }

    pub fn diff_mut(&mut self, j: i64) -> Option<&mut IntMatrix> {
        self.diffs.get_mut(&j)
    }

    /// Smallest and largest degree of nonzero rank.
    pub fn support(&self) -> Option<(i64, i64)> {
        Some((*self.ranks.keys().next()?, *self.ranks.keys().next_back()?))
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        let (lo, hi) = self.support().unwrap_or((0, -1));
        lo..=hi
    }

    pub fn direct_sum(&self, other: &ChainComplex) -> ChainComplex {
        let mut ranks = self.ranks.clone();
        for (&j, &r) in &other.ranks {
            *ranks.entry(j).or_default() += r;
        }
        let degrees: Vec<i64> = ranks.keys().copied().collect();
        let diffs = degrees
            .into_iter()
            .map(|j| (j, self.diff(j).direct_sum(&other.diff(j))))
            .collect();
        ChainComplex::new(ranks, diffs).expect("block shapes agree")
    }

    /// Reindexes so that degree `j` of the result is degree `j + shift` of `self`.
    pub fn shifted(&self, shift: i64) -> ChainComplex {
        ChainComplex {
            ranks: self.ranks.iter().map(|(&j, &r)| (j - shift, r)).collect(),
            diffs: self
                .diffs
                .iter()
                .map(|(&j, d)| (j - shift, d.clone()))
                .collect(),
        }
    }
}

/// A failed `d ∘ d = 0` check at the given source degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexViolation {
    pub degree: i64,
    pub composite: IntMatrix,
}

/// Degrees `j` where `diff(j+1) · diff(j) ≠ 0`. Shapes are enforced on construction.
pub fn validate_complex(a: &ChainComplex) -> Vec<ComplexViolation> {
    let mut out = Vec::new();
    for j in a.degrees() {
        let composite = &*a.diff(j + 1) * &*a.diff(j);
        if !composite.is_zero() {
            out.push(ComplexViolation {
                degree: j,
                composite,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    components: BTreeMap<i64, IntMatrix>,
}

impl ChainMap {
    pub fn new(
        source: ChainComplex,
        target: ChainComplex,
        components: BTreeMap<i64, IntMatrix>,
    ) -> Result<Self> {
        let mut kept = BTreeMap::new();
        for (j, m) in components {
            let expected = (target.rank(j), source.rank(j));
            if m.shape() != expected {
                return Err(Error::DimensionMismatch(format!(
                    "chain map component at degree {j} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    expected.0,
                    expected.1
                )));
            }
            if m.rows() > 0 && m.cols() > 0 {
                kept.insert(j, m);
            }
        }
        Ok(ChainMap {
            source,
            target,
            components: kept,
        })
    }

    pub fn identity(a: &ChainComplex) -> Self {
        let components = a
            .ranks()
            .iter()
            .map(|(&j, &r)| (j, IntMatrix::identity(r)))
            .collect();
        ChainMap::new(a.clone(), a.clone(), components).expect("identity shapes")
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex) -> Self {
        ChainMap::new(source.clone(), target.clone(), BTreeMap::new()).expect("no components")
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn component(&self, j: i64) -> Cow<'_, IntMatrix> {
        match self.components.get(&j) {
            Some(m) => Cow::Borrowed(m),
            None => Cow::Owned(IntMatrix::zeros(self.target.rank(j), self.source.rank(j))),
        }
    }

    pub fn components(&self) -> &BTreeMap<i64, IntMatrix> {
        &self.components
    }

    /// Degrees in the union of both supports.
    pub fn joint_degrees(&self) -> impl Iterator<Item = i64> {
        let lo = [self.source.support(), self.target.support()]
            .iter()
            .flatten()
            .map(|s| s.0)
            .min();
        let hi = [self.source.support(), self.target.support()]
            .iter()
            .flatten()
            .map(|s| s.1)
            .max();
        // both are None together; an empty range results
        lo.unwrap_or(1)..=hi.unwrap_or(0)
    }

    /// `d_B · f = f · d_A` in every degree.
    pub fn is_chain_map(&self) -> bool {
        self.joint_degrees().all(|j| {
            &*self.target.diff(j) * &*self.component(j)
                == &*self.component(j + 1) * &*self.source.diff(j)
        })
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &ChainMap) -> Result<ChainMap> {
        if self.target != next.source {
            return Err(Error::InvalidInput(
                "composing chain maps with mismatched endpoints".into(),
            ));
        }
        let components = self
            .joint_degrees()
            .chain(next.joint_degrees())
            .map(|j| (j, &*next.component(j) * &*self.component(j)))
            .collect();
        ChainMap::new(self.source.clone(), next.target.clone(), components)
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::InvalidInput(
                "adding chain maps with mismatched endpoints".into(),
            ));
        }
        let components = self
            .joint_degrees()
            .map(|j| (j, &*self.component(j) + &*other.component(j)))
            .collect();
        ChainMap::new(self.source.clone(), self.target.clone(), components)
    }
}

/// A degree −1 map `s` with `from − to = d_B s + s d_A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainHomotopy {
    from: ChainMap,
    to: ChainMap,
    components: BTreeMap<i64, IntMatrix>,
}

impl ChainHomotopy {
    /// `components[j]` maps `A^j → B^{j-1}`.
    pub fn new(from: ChainMap, to: ChainMap, components: BTreeMap<i64, IntMatrix>) -> Result<Self> {
        if from.source != to.source || from.target != to.target {
            return Err(Error::InvalidInput(
                "homotopy endpoints have different domains".into(),
            ));
        }
        let mut kept = BTreeMap::new();
        for (j, m) in components {
            let expected = (from.target.rank(j - 1), from.source.rank(j));
            if m.shape() != expected {
                return Err(Error::DimensionMismatch(format!(
                    "homotopy component at degree {j} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    expected.0,
                    expected.1
                )));
            }
            if m.rows() > 0 && m.cols() > 0 {
                kept.insert(j, m);
            }
        }
        Ok(ChainHomotopy {
            from,
            to,
            components: kept,
        })
    }

    /// Builds the homotopy from `f` to `f − (d s + s d)`, which is valid by construction.
    pub fn plant(f: ChainMap, components: BTreeMap<i64, IntMatrix>) -> Result<Self> {
        let tmp = ChainHomotopy::new(f.clone(), f.clone(), components)?;
        let to_components = f
            .joint_degrees()
            .map(|j| (j, &*f.component(j) - &tmp.boundary(j)))
            .collect();
        let to = ChainMap::new(f.source.clone(), f.target.clone(), to_components)?;
        Ok(ChainHomotopy { to, ..tmp })
    }

    pub fn from_map(&self) -> &ChainMap {
        &self.from
    }

    pub fn to_map(&self) -> &ChainMap {
        &self.to
    }

    pub fn component(&self, j: i64) -> Cow<'_, IntMatrix> {
        match self.components.get(&j) {
            Some(m) => Cow::Borrowed(m),
            None => Cow::Owned(IntMatrix::zeros(
                self.from.target.rank(j - 1),
                self.from.source.rank(j),
            )),
        }
    }

    pub fn components(&self) -> &BTreeMap<i64, IntMatrix> {
        &self.components
    }

    /// `(d_B s + s d_A)` at degree `j`.
    fn boundary(&self, j: i64) -> IntMatrix {
        let a = self.from.source();
        let b = self.from.target();
        &(&*b.diff(j - 1) * &*self.component(j)) + &(&*self.component(j + 1) * &*a.diff(j))
    }
}

pub fn check_homotopy_witness(s: &ChainHomotopy) -> bool {
    s.from
        .joint_degrees()
        .all(|j| &*s.from.component(j) - &*s.to.component(j) == s.boundary(j))
}

/// Cocycles, the homology group in the cocycle basis, and the projection onto it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyData {
    pub degree: i64,
    /// Columns are a lattice basis of `ker diff(j)`.
    pub cocycle_basis: IntMatrix,
    /// Generators are the cocycle basis vectors; relations are the coboundaries.
    pub group: FgAbGroup,
    /// The canonical projection from the free group on cocycles onto `group`.
    pub nu: GroupMorphism,
}

impl HomologyData {
    /// Coordinates in the cocycle basis of cocycles given as columns of `v`.
    pub fn cocycle_coordinates(&self, v: &IntMatrix) -> Result<IntMatrix> {
        solve_linear(&self.cocycle_basis, v)?.ok_or_else(|| {
            Error::Internal(format!("vector is not a cocycle in degree {}", self.degree))
        })
    }
}

pub fn homology_at(a: &ChainComplex, j: i64) -> HomologyData {
    let cocycle_basis = kernel_basis(&a.diff(j));
    let z = cocycle_basis.cols();
    let coboundaries = solve_linear(&cocycle_basis, &a.diff(j - 1))
        .expect("row counts agree")
        .expect("coboundaries are cocycles in a valid complex");
    let group = FgAbGroup::new(z, coboundaries).expect("shapes agree");
    let nu = GroupMorphism::new(FgAbGroup::free(z), group.clone(), IntMatrix::identity(z))
        .expect("shapes agree");
    HomologyData {
        degree: j,
        cocycle_basis,
        group,
        nu,
    }
}

pub fn induced_map_on_homology(f: &ChainMap, j: i64) -> Result<GroupMorphism> {
    let ha = homology_at(f.source(), j);
    let hb = homology_at(f.target(), j);
    induced_between(f, &ha, &hb)
}

fn induced_between(f: &ChainMap, ha: &HomologyData, hb: &HomologyData) -> Result<GroupMorphism> {
    let image = &*f.component(ha.degree) * &ha.cocycle_basis;
    let matrix = solve_linear(&hb.cocycle_basis, &image)?.ok_or_else(|| {
        Error::Internal(format!(
            "chain map sends cocycles outside cocycles in degree {}",
            ha.degree
        ))
    })?;
    GroupMorphism::new(ha.group.clone(), hb.group.clone(), matrix)
}

/// False when either end fails `d∘d = 0`.
pub fn is_quasi_iso(f: &ChainMap) -> bool {
    if !validate_complex(f.source()).is_empty() || !validate_complex(f.target()).is_empty() {
        return false;
    }
    f.joint_degrees().all(|j| {
        induced_map_on_homology(f, j)
            .and_then(|m| m.is_iso())
            .unwrap_or(false)
    })
}
