//! Multicomplexes: bigraded free groups `C^{i,j}` with components
//! `d^r: C^{i,j} → C^{i+r, j−r+1}` satisfying `Σ_{p+q=n} d^p d^q = 0`.
//!
//! Column `i` is the resolution degree, row `j` the internal degree. A chain
//! complex embeds in column 0 with its differential stored as `d^0`.

mod graded;
mod homotopy;
mod map;

use std::borrow::Cow;
use std::collections::BTreeMap;

pub(crate) use graded::Components;
pub use homotopy::{check_mc_homotopy, find_homotopy, total_homotopy, MulticomplexHomotopy};
pub use map::{check_mc_map, total_map, MulticomplexMap};

use crate::complex::ChainComplex;
use crate::linalg::{kernel_basis, solve_linear, IntMatrix};
use crate::{Error, Result};

pub type Bidegree = (i64, i64);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multicomplex {
    ranks: BTreeMap<Bidegree, usize>,
    diff: Components,
}

impl Default for Multicomplex {
    fn default() -> Self {
        Multicomplex {
            ranks: BTreeMap::new(),
            diff: Components::new(1),
        }
    }
}

impl Multicomplex {
    /// A multicomplex with the given ranks and all components zero.
    pub fn new(ranks: BTreeMap<Bidegree, usize>) -> Self {
        Multicomplex {
            ranks: ranks.into_iter().filter(|&(_, r)| r > 0).collect(),
            diff: Components::new(1),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub(crate) fn from_parts(ranks: BTreeMap<Bidegree, usize>, diff: Components) -> Self {
        debug_assert_eq!(diff.offset(), 1);
        Multicomplex {
            ranks: ranks.into_iter().filter(|&(_, r)| r > 0).collect(),
            diff,
        }
    }

    pub fn rank(&self, i: i64, j: i64) -> usize {
        self.ranks.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &BTreeMap<Bidegree, usize> {
        &self.ranks
    }

    /// Sets `d^r(i, j): C^{i,j} → C^{i+r, j−r+1}`.
    pub fn set_component(&mut self, r: usize, i: i64, j: i64, m: IntMatrix) -> Result<()> {
        let r = r as i64;
        let (ti, tj) = (i + r, j - r + 1);
        let expected = (self.rank(ti, tj), self.rank(i, j));
        if m.shape() != expected {
            return Err(Error::DimensionMismatch(format!(
                "d^{r}({i},{j}) is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                expected.0,
                expected.1
            )));
        }
        self.diff.insert(r, i, j, m);
        Ok(())
    }

    pub fn component(&self, r: usize, i: i64, j: i64) -> Cow<'_, IntMatrix> {
        let r = r as i64;
        match self.diff.get(r, i, j) {
            Some(m) => Cow::Borrowed(m),
            None => Cow::Owned(IntMatrix::zeros(
                self.rank(i + r, j - r + 1),
                self.rank(i, j),
            )),
        }
    }

    /// Mutable access to a stored component; entries may change but not the shape.
    pub fn component_mut(&mut self, r: usize, i: i64, j: i64) -> Option<&mut IntMatrix> {
        self.diff.get_mut(r as i64, i, j)
    }

    /// Stored components as `((r, i, j), d^r(i, j))`.
    pub fn components(&self) -> impl Iterator<Item = ((usize, i64, i64), &IntMatrix)> {
        self.diff
            .iter()
            .map(|((r, i, j), m)| ((r as usize, i, j), m))
    }

    pub(crate) fn diff(&self) -> &Components {
        &self.diff
    }

    /// Largest `r` with a nonzero component.
    pub fn r_max(&self) -> Option<usize> {
        self.diff.max_shift().map(|r| r as usize)
    }

    pub fn column_range(&self) -> Option<(i64, i64)> {
        let lo = self.ranks.keys().map(|b| b.0).min()?;
        let hi = self.ranks.keys().map(|b| b.0).max()?;
        Some((lo, hi))
    }

    pub fn row_range(&self) -> Option<(i64, i64)> {
        let lo = self.ranks.keys().map(|b| b.1).min()?;
        let hi = self.ranks.keys().map(|b| b.1).max()?;
        Some((lo, hi))
    }

    /// The piece `C_(k) = ⊕_{i ≥ k} C^{i,*}` of the column filtration.
    pub fn filtration_piece(&self, k: i64) -> Multicomplex {
        let ranks = self
            .ranks
            .iter()
            .filter(|(b, _)| b.0 >= k)
            .map(|(&b, &r)| (b, r))
            .collect();
        let mut out = Multicomplex::new(ranks);
        for ((r, i, j), m) in self.diff.iter() {
            if i >= k {
                out.diff.insert(r, i, j, m.clone());
            }
        }
        out
    }

    pub fn total_layout(&self) -> TotLayout {
        TotLayout::new(&self.ranks)
    }
}

/// A failure of the multicomplex identity, named by level `n` and source bidegree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MulticomplexViolation {
    pub n: i64,
    pub column: i64,
    pub row: i64,
}

/// Every `(n, i, j)` where `Σ_{p+q=n} d^p d^q ≠ 0` on `C^{i,j}`.
pub fn validate_multicomplex(c: &Multicomplex) -> Vec<MulticomplexViolation> {
    let square = Components::compose(&c.diff, &c.diff);
    square
        .nonzero_keys()
        .into_iter()
        .map(|(n, column, row)| MulticomplexViolation { n, column, row })
        .collect()
}

/// Columns `i < 0` of row `j` where `(C^{*,j}, d^1)` fails to be exact.
pub fn row_exactness_failures(c: &Multicomplex) -> Vec<Bidegree> {
    let mut out = Vec::new();
    let (Some((clo, _)), Some((rlo, rhi))) = (c.column_range(), c.row_range()) else {
        return out;
    };
    for j in rlo..=rhi {
        for i in clo..0 {
            let outgoing = c.component(1, i, j);
            let incoming = c.component(1, i - 1, j);
            let composite = &*outgoing * &*incoming;
            let kernel = kernel_basis(&outgoing);
            let exact =
                composite.is_zero() && matches!(solve_linear(&incoming, &kernel), Ok(Some(_)));
            if !exact {
                out.push((i, j));
            }
        }
    }
    out
}

/// `d^0 = 0`, no columns `i > 0`, and every row exact at every column `i < 0`.
pub fn is_homological(c: &Multicomplex) -> bool {
    let no_d0 = c.diff.iter().all(|((r, _, _), m)| r != 0 || m.is_zero());
    let no_positive = c.ranks.keys().all(|b| b.0 <= 0);
    no_d0 && no_positive && row_exactness_failures(c).is_empty()
}

/// Places `A` in column 0 with its differential as `d^0`.
pub fn embed_complex(a: &ChainComplex) -> Multicomplex {
    let ranks = a.ranks().iter().map(|(&j, &r)| ((0, j), r)).collect();
    let mut out = Multicomplex::new(ranks);
    for (&j, d) in a.diffs() {
        out.diff.insert(0, 0, j, d.clone());
    }
    out
}

/// Block layout of `Tot(C)^n = ⊕_{i+j=n} C^{i,j}`, summands ordered by ascending `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotLayout {
    blocks: BTreeMap<i64, Vec<(i64, usize, usize)>>,
}

impl TotLayout {
    fn new(ranks: &BTreeMap<Bidegree, usize>) -> Self {
        let mut blocks: BTreeMap<i64, Vec<(i64, usize, usize)>> = BTreeMap::new();
        for (&(i, j), &r) in ranks {
            blocks.entry(i + j).or_default().push((i, 0, r));
        }
        for summands in blocks.values_mut() {
            summands.sort_by_key(|s| s.0);
            let mut offset = 0;
            for s in summands.iter_mut() {
                s.1 = offset;
                offset += s.2;
            }
        }
        TotLayout { blocks }
    }

    pub fn rank(&self, n: i64) -> usize {
        self.blocks
            .get(&n)
            .map_or(0, |b| b.iter().map(|s| s.2).sum())
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.blocks.keys().copied()
    }

    /// Offset of `C^{i,j}` inside `Tot^{i+j}`.
    pub fn offset(&self, i: i64, j: i64) -> Option<usize> {
        self.blocks
            .get(&(i + j))?
            .iter()
            .find(|s| s.0 == i)
            .map(|s| s.1)
    }

    /// `(column, offset, rank)` for the summands of `Tot^n`.
    pub fn summands(&self, n: i64) -> &[(i64, usize, usize)] {
        self.blocks.get(&n).map_or(&[], Vec::as_slice)
    }
}

/// Assembles components into the block matrix `Tot^n(source) → Tot^{n+offset}(target)`.
pub(crate) fn assemble(
    source: &TotLayout,
    target: &TotLayout,
    comps: &Components,
    n: i64,
) -> IntMatrix {
    let m = n + comps.offset();
    let mut out = IntMatrix::zeros(target.rank(m), source.rank(n));
    for ((k, i, j), block) in comps.iter() {
        if i + j != n {
            continue;
        }
        let (ti, tj) = comps.target_of(k, i, j);
        if let (Some(col), Some(row)) = (source.offset(i, j), target.offset(ti, tj)) {
            out.set_block(row, col, block);
        }
    }
    out
}

pub fn total_complex(c: &Multicomplex) -> ChainComplex {
    let layout = c.total_layout();
    let ranks: BTreeMap<i64, usize> = layout.degrees().map(|n| (n, layout.rank(n))).collect();
    let diffs = layout
        .degrees()
        .map(|n| (n, assemble(&layout, &layout, &c.diff, n)))
        .collect();
    ChainComplex::new(ranks, diffs).expect("assembled blocks have consistent shapes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::validate_complex;

    fn row(ranks: &[(i64, usize)], j: i64, d1: &[(i64, IntMatrix)]) -> Multicomplex {
        let mut c = Multicomplex::new(ranks.iter().map(|&(i, r)| ((i, j), r)).collect());
        for (i, m) in d1 {
            c.set_component(1, *i, j, m.clone()).unwrap();
        }
        c
    }

    #[test]
    fn validation_examples() {
        assert!(validate_multicomplex(&Multicomplex::zero()).is_empty());
        let a = ChainComplex::from_parts(0, &[1, 1], vec![IntMatrix::from_rows(&[[2]])]).unwrap();
        assert!(validate_multicomplex(&embed_complex(&a)).is_empty());
        let bad = row(
            &[(-2, 1), (-1, 1), (0, 1)],
            0,
            &[
                (-2, IntMatrix::from_rows(&[[1]])),
                (-1, IntMatrix::from_rows(&[[1]])),
            ],
        );
        assert_eq!(
            validate_multicomplex(&bad),
            vec![MulticomplexViolation {
                n: 2,
                column: -2,
                row: 0
            }]
        );
    }

    #[test]
    fn homological_predicate() {
        let two = row(&[(-1, 1), (0, 1)], 0, &[(-1, IntMatrix::from_rows(&[[2]]))]);
        assert!(is_homological(&two));
        let zero = row(&[(-1, 1), (0, 1)], 0, &[(-1, IntMatrix::from_rows(&[[0]]))]);
        assert!(!is_homological(&zero));
        assert_eq!(row_exactness_failures(&zero), vec![(-1, 0)]);
        let positive = Multicomplex::new([((1, 0), 1)].into());
        assert!(!is_homological(&positive));
        let a = ChainComplex::from_parts(0, &[1, 1], vec![IntMatrix::from_rows(&[[2]])]).unwrap();
        assert!(!is_homological(&embed_complex(&a)));
    }

    #[test]
    fn embedding_and_totalization() {
        assert_eq!(
            total_complex(&embed_complex(&ChainComplex::zero())),
            ChainComplex::zero()
        );
        let a = ChainComplex::from_parts(0, &[1, 1], vec![IntMatrix::from_rows(&[[2]])]).unwrap();
        let e = embed_complex(&a);
        assert_eq!(e.rank(0, 0), 1);
        assert_eq!(e.rank(0, 1), 1);
        assert_eq!(*e.component(0, 0, 0), IntMatrix::from_rows(&[[2]]));
        assert_eq!(total_complex(&e), a);

        let c = row(&[(-1, 1), (0, 1)], 1, &[(-1, IntMatrix::from_rows(&[[2]]))]);
        let t = total_complex(&c);
        assert_eq!(t.rank(0), 1);
        assert_eq!(t.rank(1), 1);
        assert_eq!(*t.diff(0), IntMatrix::from_rows(&[[2]]));
        assert!(validate_complex(&t).is_empty());
    }

    #[test]
    fn filtration_is_increasing() {
        let c = row(
            &[(-2, 1), (-1, 1), (0, 1)],
            0,
            &[
                (-2, IntMatrix::from_rows(&[[0]])),
                (-1, IntMatrix::from_rows(&[[3]])),
            ],
        );
        let c0 = c.filtration_piece(0);
        let c1 = c.filtration_piece(-1);
        assert!(c0.ranks().keys().all(|b| c1.ranks().contains_key(b)));
        assert_eq!(c.filtration_piece(-2), c);
    }
}
