//! The left derived functor of `− ⊗ M`: resolve, tensor levelwise, totalize,
//! take homology.
//!
//! Tensoring the free multicomplex with `M` is carried out by tensoring with
//! the minimal free resolution `P_M = [P₁ →∂ P₀]`, so every term stays free.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::complex::{homology_at, ChainComplex};
use crate::linalg::{FgAbGroup, IntMatrix};
use crate::multicomplex::total_complex;
use crate::resolution::{free_resolution, homological_resolution, HomologicalResolution};
use crate::Result;

/// `K ⊗ P` for a free complex `K` and a two-term free complex `P = [P₁ →∂ P₀]`
/// in degrees −1, 0: `T^n = K^n ⊗ P₀ ⊕ K^{n+1} ⊗ P₁` with differential
/// `d ⊗ 1 + (−1)^{|a|} 1 ⊗ ∂`.
fn tensor_with_two_term(
    k: &ChainComplex,
    r: usize,
    s: usize,
    boundary: &IntMatrix,
) -> ChainComplex {
    let Some((lo, hi)) = k.support() else {
        return ChainComplex::zero();
    };
    let degrees = (lo - 1)..=hi;
    let rank = |n: i64| k.rank(n) * r + k.rank(n + 1) * s;
    let ranks: BTreeMap<i64, usize> = degrees.clone().map(|n| (n, rank(n))).collect();
    let diffs = degrees
        .map(|n| {
            let top = k.rank(n) * r;
            let next_top = k.rank(n + 1) * r;
            let mut d = IntMatrix::zeros(rank(n + 1), rank(n));
            d.set_block(0, 0, &k.diff(n).kron(&IntMatrix::identity(r)));
            let sign = if (n + 1) % 2 == 0 {
                BigInt::from(1)
            } else {
                BigInt::from(-1)
            };
            d.set_block(
                0,
                top,
                &IntMatrix::identity(k.rank(n + 1))
                    .kron(boundary)
                    .scale(&sign),
            );
            d.set_block(next_top, top, &k.diff(n + 1).kron(&IntMatrix::identity(s)));
            (n, d)
        })
        .collect();
    ChainComplex::new(ranks, diffs).expect("tensor blocks have consistent shapes")
}

/// A free complex computing `L(− ⊗ M)(A)` from a resolution of `A`.
pub fn derived_tensor_complex(res: &HomologicalResolution, m: &FgAbGroup) -> ChainComplex {
    let p = free_resolution(m);
    let total = total_complex(res.multicomplex());
    tensor_with_two_term(&total, p.rank(0), p.rank(-1), &p.d1(-1))
}

/// Homology of `L(− ⊗ M)(A)` per degree, with the padding used to resolve `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedTensorResult {
    pub complex: ChainComplex,
    pub coefficients: FgAbGroup,
    /// Nonzero homology groups in canonical form.
    pub homology: BTreeMap<i64, FgAbGroup>,
    pub padding: BTreeMap<i64, usize>,
}

impl DerivedTensorResult {
    pub fn in_degree(&self, n: i64) -> FgAbGroup {
        self.homology
            .get(&n)
            .cloned()
            .unwrap_or_else(FgAbGroup::zero)
    }
}

fn canonical(g: &FgAbGroup) -> FgAbGroup {
    FgAbGroup::from_invariants(g.invariant_factors(), g.free_rank())
}

pub fn hyper_derived_tensor(
    a: &ChainComplex,
    m: &FgAbGroup,
    padding: &BTreeMap<i64, usize>,
) -> Result<DerivedTensorResult> {
    let res = homological_resolution(a, padding)?;
    let t = derived_tensor_complex(&res, m);
    let homology = t
        .degrees()
        .map(|n| (n, canonical(&homology_at(&t, n).group)))
        .filter(|(_, g)| !g.is_trivial())
        .collect();
    Ok(DerivedTensorResult {
        complex: a.clone(),
        coefficients: m.clone(),
        homology,
        padding: padding.clone(),
    })
}

/// `Tor_i(G, M)`, computed by resolving `G` (as a complex in degree 0) and
/// taking derived tensor homology in degree `−i`.
pub fn tor(g: &FgAbGroup, m: &FgAbGroup, i: usize) -> Result<FgAbGroup> {
    let presentation = free_resolution(g);
    let result = hyper_derived_tensor(presentation.complex(), m, &BTreeMap::new())?;
    Ok(result.in_degree(-(i as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::validate_complex;
    use crate::random::random_complex;
    use num_integer::Integer;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Order of `ℤ/a ⊗ ℤ/b` by counting bilinear maps `ℤ/a × ℤ/b → ℤ/ab`:
    /// such a map is fixed by `x = β(1, 1)` with `a·x = b·x = 0`.
    fn tensor_order_by_bilinear_maps(a: u64, b: u64) -> u64 {
        let n = a * b;
        (0..n)
            .filter(|x| (a * x).is_multiple_of(n) && (b * x).is_multiple_of(n))
            .count() as u64
    }

    #[test]
    fn bilinear_oracle_agrees_with_gcd() {
        for a in 1..=6u64 {
            for b in 1..=6u64 {
                assert_eq!(tensor_order_by_bilinear_maps(a, b), a.gcd(&b));
            }
        }
    }

    #[test]
    fn tor_examples() {
        let z = FgAbGroup::free(1);
        let z3 = FgAbGroup::cyclic(3);
        assert_eq!(tor(&z, &z3, 0).unwrap(), FgAbGroup::cyclic(3));
        assert!(tor(&z, &z3, 1).unwrap().is_trivial());
        assert!(tor(&FgAbGroup::cyclic(2), &z3, 0).unwrap().is_trivial());
        assert_eq!(
            tor(&FgAbGroup::cyclic(2), &FgAbGroup::cyclic(2), 1).unwrap(),
            FgAbGroup::cyclic(2)
        );
        for a in 2..=6u64 {
            for b in 2..=6u64 {
                let order = tensor_order_by_bilinear_maps(a, b);
                let t0 = tor(&FgAbGroup::cyclic(a), &FgAbGroup::cyclic(b), 0).unwrap();
                assert!(t0.is_isomorphic(&FgAbGroup::cyclic(order)));
            }
        }
    }

    #[test]
    fn tensoring_with_z_is_identity() {
        let a = ChainComplex::from_parts(0, &[1, 1], vec![IntMatrix::from_rows(&[[2]])]).unwrap();
        let res = homological_resolution(&a, &BTreeMap::new()).unwrap();
        assert_eq!(
            derived_tensor_complex(&res, &FgAbGroup::free(1)),
            total_complex(res.multicomplex())
        );
        let zero = homological_resolution(&ChainComplex::zero(), &BTreeMap::new()).unwrap();
        assert!(derived_tensor_complex(&zero, &FgAbGroup::cyclic(2)).is_zero());
    }

    /// Rank over 𝔽₂ by row reduction of the entries mod 2.
    fn rank_mod2(m: &IntMatrix) -> usize {
        let mut rows: Vec<Vec<bool>> = (0..m.rows())
            .map(|r| m.row(r).iter().map(|x| x.is_odd()).collect())
            .collect();
        let mut rank = 0;
        for c in 0..m.cols() {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][c]) else {
                continue;
            };
            rows.swap(rank, p);
            for r in 0..rows.len() {
                if r != rank && rows[r][c] {
                    let pivot = rows[rank].clone();
                    rows[r].iter_mut().zip(pivot).for_each(|(x, y)| *x ^= y);
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn multiplication_by_two_with_z2() {
        let a = ChainComplex::from_parts(0, &[1, 1], vec![IntMatrix::from_rows(&[[2]])]).unwrap();
        let r = hyper_derived_tensor(&a, &FgAbGroup::cyclic(2), &BTreeMap::new()).unwrap();
        // A is free, so L(− ⊗ ℤ/2)(A) = A ⊗ 𝔽₂ and its homology has 𝔽₂-dimension
        // rank A^n − rank d^n − rank d^{n−1}
        for n in -1..=2 {
            let dim = a.rank(n) - rank_mod2(&a.diff(n)) - rank_mod2(&a.diff(n - 1));
            let g = r.in_degree(n);
            assert_eq!(g.free_rank(), 0);
            assert_eq!(g.invariant_factors().len(), dim);
            assert!(g.invariant_factors().iter().all(|f| *f == BigInt::from(2)));
        }
        assert_eq!(r.homology.keys().copied().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn point_with_z2() {
        let a = ChainComplex::free_in_degree(0, 1);
        let r = hyper_derived_tensor(&a, &FgAbGroup::cyclic(2), &BTreeMap::new()).unwrap();
        assert_eq!(r.homology, BTreeMap::from([(0, FgAbGroup::cyclic(2))]));
    }

    #[test]
    fn free_with_zero_differential() {
        let a = ChainComplex::from_parts(0, &[2, 0, 1], vec![]).unwrap();
        let r = hyper_derived_tensor(&a, &FgAbGroup::cyclic(3), &BTreeMap::new()).unwrap();
        assert!(r
            .in_degree(0)
            .is_isomorphic(&FgAbGroup::from_invariants(&[3.into(), 3.into()], 0)));
        assert!(r.in_degree(2).is_isomorphic(&FgAbGroup::cyclic(3)));
        assert_eq!(r.homology.len(), 2);
    }

    #[test]
    fn tensor_complexes_are_complexes_and_padding_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..10 {
            let a = random_complex(&mut rng, -2, 2, 3);
            let m = FgAbGroup::from_invariants(&[BigInt::from(2 + trial % 3)], trial % 2);
            let padding: BTreeMap<i64, usize> = a.ranks().keys().map(|&j| (j, 1)).collect();
            let res = homological_resolution(&a, &padding).unwrap();
            assert!(validate_complex(&derived_tensor_complex(&res, &m)).is_empty());
            let minimal = hyper_derived_tensor(&a, &m, &BTreeMap::new()).unwrap();
            let padded = hyper_derived_tensor(&a, &m, &padding).unwrap();
            assert_eq!(minimal.homology, padded.homology);
        }
    }

    #[test]
    fn tor_is_symmetric() {
        for a in 2..=12u64 {
            for b in a + 1..=12u64 {
                for i in 0..=1 {
                    let (ga, gb) = (FgAbGroup::cyclic(a), FgAbGroup::cyclic(b));
                    assert_eq!(tor(&ga, &gb, i).unwrap(), tor(&gb, &ga, i).unwrap());
                }
            }
        }
    }

    #[test]
    fn quasi_isomorphic_complexes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for trial in 0..10 {
            let f = crate::random::random_quasi_iso(&mut rng, -2, 2, 3, 2);
            let m = FgAbGroup::from_invariants(&[BigInt::from(2 + trial % 5)], 0);
            let a = hyper_derived_tensor(f.source(), &m, &BTreeMap::new()).unwrap();
            let b = hyper_derived_tensor(f.target(), &m, &BTreeMap::new()).unwrap();
            assert_eq!(a.homology, b.homology);
        }
    }
}
