use std::collections::BTreeMap;

use crate::linalg::IntMatrix;

/// Sparse family of matrices `(k, i, j) ↦ M` where `M` maps bidegree `(i, j)`
/// to `(i + k, j − k + offset)`.
///
/// Differentials have `offset = 1`, maps `0`, homotopies `−1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Components {
    offset: i64,
    blocks: BTreeMap<(i64, i64, i64), IntMatrix>,
}

impl Components {
    pub fn new(offset: i64) -> Self {
        Components {
            offset,
            blocks: BTreeMap::new(),
        }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn target_of(&self, k: i64, i: i64, j: i64) -> (i64, i64) {
        (i + k, j - k + self.offset)
    }

    pub fn get(&self, k: i64, i: i64, j: i64) -> Option<&IntMatrix> {
        self.blocks.get(&(k, i, j))
    }

    pub fn get_mut(&mut self, k: i64, i: i64, j: i64) -> Option<&mut IntMatrix> {
        self.blocks.get_mut(&(k, i, j))
    }

    /// Stores a block, dropping empty shapes.
    pub fn insert(&mut self, k: i64, i: i64, j: i64, m: IntMatrix) {
        if m.rows() > 0 && m.cols() > 0 {
            self.blocks.insert((k, i, j), m);
        } else {
            self.blocks.remove(&(k, i, j));
        }
    }

    pub fn accumulate(&mut self, k: i64, i: i64, j: i64, m: &IntMatrix) {
        if m.rows() == 0 || m.cols() == 0 {
            return;
        }
        match self.blocks.get_mut(&(k, i, j)) {
            Some(existing) => *existing = &*existing + m,
            None => {
                self.blocks.insert((k, i, j), m.clone());
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64, i64), &IntMatrix)> {
        self.blocks.iter().map(|(&key, m)| (key, m))
    }

    pub fn max_shift(&self) -> Option<i64> {
        self.blocks
            .iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(&(k, _, _), _)| k)
            .max()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(IntMatrix::is_zero)
    }

    /// Keys of blocks that are nonzero.
    pub fn nonzero_keys(&self) -> Vec<(i64, i64, i64)> {
        self.blocks
            .iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(&key, _)| key)
            .collect()
    }

    /// `outer ∘ inner`, summed by total shift.
    pub fn compose(outer: &Components, inner: &Components) -> Components {
        let mut by_source: BTreeMap<(i64, i64), Vec<(i64, &IntMatrix)>> = BTreeMap::new();
        for (&(a, i, j), m) in &outer.blocks {
            by_source.entry((i, j)).or_default().push((a, m));
        }
        let mut out = Components::new(outer.offset + inner.offset);
        for (&(b, i, j), m_in) in &inner.blocks {
            let Some(outs) = by_source.get(&inner.target_of(b, i, j)) else {
                continue;
            };
            for &(a, m_out) in outs {
                out.accumulate(a + b, i, j, &(m_out * m_in));
            }
        }
        out
    }

    pub fn add(&self, other: &Components) -> Components {
        assert_eq!(self.offset, other.offset);
        let mut out = self.clone();
        for (&(k, i, j), m) in &other.blocks {
            out.accumulate(k, i, j, m);
        }
        out
    }

    pub fn neg(&self) -> Components {
        Components {
            offset: self.offset,
            blocks: self.blocks.iter().map(|(&key, m)| (key, -m)).collect(),
        }
    }

    pub fn sub(&self, other: &Components) -> Components {
        self.add(&other.neg())
    }
}
