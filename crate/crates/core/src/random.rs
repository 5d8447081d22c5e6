//! Seeded generators for fixtures: unimodular matrices, bounded complexes
//! built from conjugated elementary pieces, quasi-isomorphisms and homotopy
//! components.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::Rng;

use crate::complex::{ChainComplex, ChainHomotopy, ChainMap};
use crate::linalg::IntMatrix;
use crate::multicomplex::{Multicomplex, MulticomplexMap};

/// A random unimodular `n × n` matrix together with its inverse, built from
/// `2n` elementary operations with small multipliers.
pub fn unimodular_pair<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (IntMatrix, IntMatrix) {
    let mut u = IntMatrix::identity(n);
    let mut inv = IntMatrix::identity(n);
    if n == 0 {
        return (u, inv);
    }
    for _ in 0..2 * n {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        match rng.gen_range(0..4) {
            0 => {
                u.swap_rows(a, b);
                inv.swap_cols(a, b);
            }
            1 => {
                u.negate_row(a);
                inv.negate_col(a);
            }
            _ if a != b => {
                let q = BigInt::from(*[-2, -1, 1, 2].get(rng.gen_range(0..4)).unwrap_or(&1));
                // E = I − q·e_ab acts on rows; E⁻¹ = I + q·e_ab acts on inverse columns
                u.sub_row_multiple(a, b, &q);
                inv.sub_col_multiple(b, a, &-q);
            }
            _ => {}
        }
    }
    (u, inv)
}

pub fn random_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    bound: i64,
) -> IntMatrix {
    IntMatrix::from_fn(rows, cols, |_, _| {
        BigInt::from(rng.gen_range(-bound..=bound))
    })
}

/// Builds a complex from a list of pieces `(j, Some(k))` for `[ℤ →k ℤ]` in
/// degrees `j, j+1` and `(j, None)` for a single `ℤ` in degree `j`.
pub fn elementary_complex(pieces: &[(i64, Option<i64>)]) -> ChainComplex {
    let mut ranks: BTreeMap<i64, usize> = BTreeMap::new();
    let mut placed = Vec::new();
    for &(j, k) in pieces {
        let lo = *ranks.entry(j).or_default();
        *ranks.get_mut(&j).unwrap() += 1;
        let hi = k.map(|_| {
            let e = ranks.entry(j + 1).or_default();
            *e += 1;
            *e - 1
        });
        placed.push((j, lo, hi, k));
    }
    let mut diffs: BTreeMap<i64, IntMatrix> = BTreeMap::new();
    for (j, lo, hi, k) in placed {
        if let (Some(hi), Some(k)) = (hi, k) {
            let d = diffs
                .entry(j)
                .or_insert_with(|| IntMatrix::zeros(ranks[&(j + 1)], ranks[&j]));
            d.set(hi, lo, BigInt::from(k));
        }
    }
    ChainComplex::new(ranks, diffs).expect("pieces assemble to a complex")
}

/// Changes basis in every degree by a random unimodular matrix. Returns the
/// new complex and the chain isomorphism from the old one.
pub fn conjugate_complex<R: Rng + ?Sized>(
    rng: &mut R,
    a: &ChainComplex,
) -> (ChainComplex, ChainMap) {
    let mut forward = BTreeMap::new();
    let mut backward = BTreeMap::new();
    for (&j, &r) in a.ranks() {
        let (u, inv) = unimodular_pair(rng, r);
        forward.insert(j, u);
        backward.insert(j, inv);
    }
    let diffs = a
        .diffs()
        .iter()
        .map(|(&j, d)| (j, &(&forward[&(j + 1)] * d) * &backward[&j]))
        .collect();
    let b = ChainComplex::new(a.ranks().clone(), diffs).expect("conjugation preserves shapes");
    let iso = ChainMap::new(a.clone(), b.clone(), forward).expect("shapes agree");
    (b, iso)
}

/// A random bounded complex supported in `[lo, hi]` with every rank at most
/// `max_rank`: a direct sum of shifted `[ℤ →k ℤ]` (`0 ≤ k ≤ 5`) and single
/// `ℤ` pieces, conjugated by random unimodular matrices.
pub fn random_complex<R: Rng + ?Sized>(
    rng: &mut R,
    lo: i64,
    hi: i64,
    max_rank: usize,
) -> ChainComplex {
    let width = (hi - lo + 1).max(0) as usize;
    let attempts = rng.gen_range(0..=width * max_rank);
    let mut ranks: BTreeMap<i64, usize> = BTreeMap::new();
    let mut pieces = Vec::new();
    for _ in 0..attempts {
        let j = rng.gen_range(lo..=hi);
        let pair = j < hi && rng.gen_bool(0.6);
        let room =
            |ranks: &BTreeMap<i64, usize>, d: i64| ranks.get(&d).copied().unwrap_or(0) < max_rank;
        if !room(&ranks, j) || (pair && !room(&ranks, j + 1)) {
            continue;
        }
        *ranks.entry(j).or_default() += 1;
        if pair {
            *ranks.entry(j + 1).or_default() += 1;
            pieces.push((j, Some(rng.gen_range(0..=5))));
        } else {
            pieces.push((j, None));
        }
    }
    conjugate_complex(rng, &elementary_complex(&pieces)).0
}

/// An exact complex made of `pieces` conjugated copies of `[ℤ →±1 ℤ]`.
pub fn random_acyclic<R: Rng + ?Sized>(
    rng: &mut R,
    lo: i64,
    hi: i64,
    pieces: usize,
) -> ChainComplex {
    if hi <= lo {
        return ChainComplex::zero();
    }
    let list: Vec<_> = (0..pieces)
        .map(|_| {
            (
                rng.gen_range(lo..hi),
                Some(if rng.gen_bool(0.5) { 1 } else { -1 }),
            )
        })
        .collect();
    conjugate_complex(rng, &elementary_complex(&list)).0
}

/// Random components `A^j → B^{j−1}` with entries in `[−bound, bound]`.
pub fn random_chain_homotopy_components<R: Rng + ?Sized>(
    rng: &mut R,
    a: &ChainComplex,
    b: &ChainComplex,
    bound: i64,
) -> BTreeMap<i64, IntMatrix> {
    a.ranks()
        .iter()
        .map(|(&j, &r)| (j, random_matrix(rng, b.rank(j - 1), r, bound)))
        .collect()
}

/// A quasi-isomorphism `f: A → A′` with `A = B ⊕ E`, `A′ = B ⊕ E′` for a
/// random complex `B` and exact `E, E′`; `f` is the projection-inclusion
/// through `B` perturbed by a random null-homotopic map, and both ends are
/// conjugated afterwards.
pub fn random_quasi_iso<R: Rng + ?Sized>(
    rng: &mut R,
    lo: i64,
    hi: i64,
    max_rank: usize,
    acyclic_pieces: usize,
) -> ChainMap {
    let b = random_complex(rng, lo, hi, max_rank);
    let (n1, n2) = (
        rng.gen_range(0..=acyclic_pieces),
        rng.gen_range(0..=acyclic_pieces),
    );
    let e1 = random_acyclic(rng, lo, hi, n1);
    let e2 = random_acyclic(rng, lo, hi, n2);
    let a = b.direct_sum(&e1);
    let a2 = b.direct_sum(&e2);
    let components = a
        .ranks()
        .iter()
        .map(|(&j, &r)| {
            let mut m = IntMatrix::zeros(a2.rank(j), r);
            m.set_block(0, 0, &IntMatrix::identity(b.rank(j)));
            (j, m)
        })
        .collect();
    let f0 = ChainMap::new(a.clone(), a2.clone(), components).expect("block shapes agree");
    let h = random_chain_homotopy_components(rng, &a, &a2, 1);
    let f = ChainHomotopy::plant(f0, h)
        .expect("shapes agree")
        .to_map()
        .clone();
    let (_, to_a) = conjugate_complex(rng, &a);
    let (_, to_a2) = conjugate_complex(rng, &a2);
    let from_a = inverse_iso(&to_a);
    from_a
        .then(&f)
        .and_then(|g| g.then(&to_a2))
        .expect("endpoints agree")
}

fn inverse_iso(f: &ChainMap) -> ChainMap {
    let components = f
        .components()
        .iter()
        .map(|(&j, m)| {
            (
                j,
                crate::linalg::unimodular_inverse(m).expect("conjugation is unimodular"),
            )
        })
        .collect();
    ChainMap::new(f.target().clone(), f.source().clone(), components).expect("shapes agree")
}

/// A random chain map `X → B` that is generally nontrivial on homology:
/// `X` is `B ⊕ Y` conjugated, and the map is the projection onto `B` plus a
/// random null-homotopic term.
pub fn random_map_into<R: Rng + ?Sized>(
    rng: &mut R,
    b: &ChainComplex,
    lo: i64,
    hi: i64,
    max_rank: usize,
) -> ChainMap {
    let y = random_complex(rng, lo, hi, max_rank);
    let x = b.direct_sum(&y);
    let components = x
        .ranks()
        .iter()
        .map(|(&j, &r)| {
            let mut m = IntMatrix::zeros(b.rank(j), r);
            m.set_block(0, 0, &IntMatrix::identity(b.rank(j)));
            (j, m)
        })
        .collect();
    let p = ChainMap::new(x.clone(), b.clone(), components).expect("block shapes agree");
    let h = random_chain_homotopy_components(rng, &x, b, 1);
    let p = ChainHomotopy::plant(p, h)
        .expect("shapes agree")
        .to_map()
        .clone();
    let (_, to_x) = conjugate_complex(rng, &x);
    inverse_iso(&to_x).then(&p).expect("endpoints agree")
}

/// Random homotopy components `s^k(i, j)` for `k ∈ [−1, max_shift]`,
/// entries in `[−bound, bound]`, each block kept with probability `density`.
pub fn random_mc_homotopy_components<R: Rng + ?Sized>(
    rng: &mut R,
    source: &Multicomplex,
    target: &Multicomplex,
    max_shift: i64,
    bound: i64,
    density: f64,
) -> BTreeMap<(i64, i64, i64), IntMatrix> {
    let mut out = BTreeMap::new();
    for (&(i, j), &a) in source.ranks() {
        for k in -1..=max_shift {
            let b = target.rank(i + k, j - k - 1);
            if b > 0 && rng.gen_bool(density) {
                out.insert((k, i, j), random_matrix(rng, b, a, bound));
            }
        }
    }
    out
}

/// Random multicomplex map components `f^k(s, t)` for `k ∈ [0, max_shift]`.
/// The result is usually not a chain map; combine with planting or
/// boundaries to obtain one.
pub fn random_mc_map_components<R: Rng + ?Sized>(
    rng: &mut R,
    source: &Multicomplex,
    target: &Multicomplex,
    max_shift: i64,
    bound: i64,
) -> BTreeMap<(i64, i64, i64), IntMatrix> {
    let mut out = BTreeMap::new();
    for (&(s, t), &a) in source.ranks() {
        for k in 0..=max_shift {
            let b = target.rank(s + k, t - k);
            if b > 0 {
                out.insert((k, s, t), random_matrix(rng, b, a, bound));
            }
        }
    }
    out
}

/// `f` perturbed by the boundary of random homotopy components; still a
/// multicomplex map whenever `f` is one.
pub fn perturb_by_boundary<R: Rng + ?Sized>(
    rng: &mut R,
    f: &MulticomplexMap,
    bound: i64,
) -> MulticomplexMap {
    let max_shift = f
        .target()
        .column_range()
        .zip(f.source().column_range())
        .map_or(0, |((_, thi), (slo, _))| thi - slo);
    let comps = random_mc_homotopy_components(rng, f.source(), f.target(), max_shift, bound, 0.5);
    crate::multicomplex::MulticomplexHomotopy::plant(f.clone(), comps)
        .expect("shapes agree")
        .to_map()
        .clone()
}
