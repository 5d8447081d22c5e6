//! Smith normal form over the integers and the solvers built on it.
//!
//! The pivot rule is fixed: within the active submatrix the nonzero entry of
//! smallest absolute value wins, ties broken by lowest row and then lowest
//! column. Every output is therefore a pure function of the input matrix.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;
use crate::{Error, Result};

/// `U · A · V = S` with `U`, `V` unimodular and `S` diagonal with a divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries, in order.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.s.rows().min(self.s.cols());
        (0..k)
            .map(|i| self.s.get(i, i).clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().len()
    }
}

/// Reduces `a` in place to Smith form, mirroring row operations on `left`
/// (which must have `a.rows()` rows) and column operations on `right`
/// (which must have `a.cols()` columns). Returns the rank.
fn eliminate(
    a: &mut IntMatrix,
    mut left: Option<&mut IntMatrix>,
    mut right: Option<&mut IntMatrix>,
) -> usize {
    let (m, n) = a.shape();
    let mut t = 0;
    while t < m.min(n) {
        let Some((pr, pc)) = smallest_entry(a, t) else {
            break;
        };
        move_pivot(a, &mut left, &mut right, t, pr, pc);
        loop {
            let p = a.get(t, t).clone();
            let mut remainder = false;
            for r in t + 1..m {
                if a.get(r, t).is_zero() {
                    continue;
                }
                let q = a.get(r, t) / &p;
                a.sub_row_multiple(r, t, &q);
                if let Some(l) = left.as_deref_mut() {
                    l.sub_row_multiple(r, t, &q);
                }
                remainder |= !a.get(r, t).is_zero();
            }
            for c in t + 1..n {
                if a.get(t, c).is_zero() {
                    continue;
                }
                let q = a.get(t, c) / &p;
                a.sub_col_multiple(c, t, &q);
                if let Some(v) = right.as_deref_mut() {
                    v.sub_col_multiple(c, t, &q);
                }
                remainder |= !a.get(t, c).is_zero();
            }
            if remainder {
                let (pr, pc) = smallest_entry(a, t).expect("nonzero remainder present");
                move_pivot(a, &mut left, &mut right, t, pr, pc);
                continue;
            }
            // Row and column t are clear; enforce divisibility on the rest.
            let bad = (t + 1..m).find(|&r| (t + 1..n).any(|c| !a.get(r, c).is_multiple_of(&p)));
            match bad {
                Some(r) => {
                    let minus_one = BigInt::from(-1);
                    a.sub_row_multiple(t, r, &minus_one);
                    if let Some(l) = left.as_deref_mut() {
                        l.sub_row_multiple(t, r, &minus_one);
                    }
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            if let Some(l) = left.as_deref_mut() {
                l.negate_row(t);
            }
        }
        t += 1;
    }
    t
}

fn smallest_entry(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for r in t..a.rows() {
        for c in t..a.cols() {
            let v = a.get(r, c);
            if v.is_zero() {
                continue;
            }
            let abs = v.abs();
            if best.as_ref().is_none_or(|(b, _, _)| abs < *b) {
                best = Some((abs, r, c));
            }
        }
    }
    best.map(|(_, r, c)| (r, c))
}

fn move_pivot(
    a: &mut IntMatrix,
    left: &mut Option<&mut IntMatrix>,
    right: &mut Option<&mut IntMatrix>,
    t: usize,
    r: usize,
    c: usize,
) {
    a.swap_rows(t, r);
    if let Some(l) = left.as_deref_mut() {
        l.swap_rows(t, r);
    }
    a.swap_cols(t, c);
    if let Some(v) = right.as_deref_mut() {
        v.swap_cols(t, c);
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let mut s = a.clone();
    let mut u = IntMatrix::identity(a.rows());
    let mut v = IntMatrix::identity(a.cols());
    eliminate(&mut s, Some(&mut u), Some(&mut v));
    SmithDecomposition { u, s, v }
}

/// Invariant factors including units, i.e. the nonzero Smith diagonal.
pub fn smith_diagonal(a: &IntMatrix) -> Vec<BigInt> {
    let mut s = a.clone();
    let rank = eliminate(&mut s, None, None);
    (0..rank).map(|i| s.get(i, i).clone()).collect()
}

pub fn rank(a: &IntMatrix) -> usize {
    let mut s = a.clone();
    eliminate(&mut s, None, None)
}

/// Solves `A · X = B` over the integers.
///
/// Returns the particular solution obtained from Smith back-substitution with
/// every free parameter set to zero, or `None` when no integer solution exists.
pub fn solve_linear(a: &IntMatrix, b: &IntMatrix) -> Result<Option<IntMatrix>> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve_linear: A has {} rows but B has {}",
            a.rows(),
            b.rows()
        )));
    }
    let n = a.cols();
    let mut s = a.clone();
    let mut ub = b.clone();
    let mut v = IntMatrix::identity(n);
    let rank = eliminate(&mut s, Some(&mut ub), Some(&mut v));
    for r in rank..ub.rows() {
        if ub.row(r).iter().any(|x| !x.is_zero()) {
            return Ok(None);
        }
    }
    let mut y = IntMatrix::zeros(n, b.cols());
    for i in 0..rank {
        let d = s.get(i, i);
        for c in 0..b.cols() {
            let (q, rem) = ub.get(i, c).div_rem(d);
            if !rem.is_zero() {
                return Ok(None);
            }
            y.set(i, c, q);
        }
    }
    Ok(Some(&v * &y))
}

/// Columns form a saturated lattice basis of the integer kernel of `a`.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let n = a.cols();
    let mut s = a.clone();
    let mut v = IntMatrix::identity(n);
    let rank = eliminate(&mut s, None, Some(&mut v));
    v.select_columns(rank..n)
}

/// Inverse of a unimodular matrix.
pub fn unimodular_inverse(u: &IntMatrix) -> Result<IntMatrix> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch(
            "inverse of a non-square matrix".into(),
        ));
    }
    solve_linear(u, &IntMatrix::identity(u.rows()))?
        .filter(|x| u * x == IntMatrix::identity(u.rows()))
        .ok_or_else(|| Error::DimensionMismatch("matrix is not unimodular".into()))
}
