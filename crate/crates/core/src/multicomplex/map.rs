use std::borrow::Cow;
use std::collections::BTreeMap;

use super::{assemble, embed_complex, Components, Multicomplex};
use crate::complex::ChainMap;
use crate::linalg::IntMatrix;
use crate::{Error, Result};

/// A filtration-preserving chain map of total degree zero: components
/// `f^k(s, t): A^{s,t} → B^{s+k, t−k}` with `k ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MulticomplexMap {
    source: Multicomplex,
    target: Multicomplex,
    comps: Components,
}

impl MulticomplexMap {
    /// Components are keyed `(k, s, t)`. A negative `k` would raise the
    /// column filtration and is rejected.
    pub fn new(
        source: Multicomplex,
        target: Multicomplex,
        components: BTreeMap<(i64, i64, i64), IntMatrix>,
    ) -> Result<Self> {
        let mut comps = Components::new(0);
        for ((k, s, t), m) in components {
            if k < 0 {
                return Err(Error::FiltrationViolation(format!(
                    "map component f^{k} at ({s},{t})"
                )));
            }
            let expected = (target.rank(s + k, t - k), source.rank(s, t));
            if m.shape() != expected {
                return Err(Error::DimensionMismatch(format!(
                    "f^{k}({s},{t}) is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    expected.0,
                    expected.1
                )));
            }
            comps.insert(k, s, t, m);
        }
        Ok(MulticomplexMap {
            source,
            target,
            comps,
        })
    }

    pub(crate) fn from_components(
        source: Multicomplex,
        target: Multicomplex,
        comps: Components,
    ) -> Self {
        debug_assert_eq!(comps.offset(), 0);
        MulticomplexMap {
            source,
            target,
            comps,
        }
    }

    pub fn identity(c: &Multicomplex) -> Self {
        let mut comps = Components::new(0);
        for (&(i, j), &r) in c.ranks() {
            comps.insert(0, i, j, IntMatrix::identity(r));
        }
        Self::from_components(c.clone(), c.clone(), comps)
    }

    pub fn zero(source: &Multicomplex, target: &Multicomplex) -> Self {
        Self::from_components(source.clone(), target.clone(), Components::new(0))
    }

    /// The column-0 map induced by a chain map between the embedded complexes.
    pub fn embed(f: &ChainMap) -> Self {
        let mut comps = Components::new(0);
        for (&j, m) in f.components() {
            comps.insert(0, 0, j, m.clone());
        }
        Self::from_components(embed_complex(f.source()), embed_complex(f.target()), comps)
    }

    pub fn source(&self) -> &Multicomplex {
        &self.source
    }

    pub fn target(&self) -> &Multicomplex {
        &self.target
    }

    pub fn component(&self, k: i64, s: i64, t: i64) -> Cow<'_, IntMatrix> {
        match self.comps.get(k, s, t) {
            Some(m) => Cow::Borrowed(m),
            None => Cow::Owned(IntMatrix::zeros(
                self.target.rank(s + k, t - k),
                self.source.rank(s, t),
            )),
        }
    }

    pub fn component_mut(&mut self, k: i64, s: i64, t: i64) -> Option<&mut IntMatrix> {
        self.comps.get_mut(k, s, t)
    }

    /// Stored components as `((k, s, t), f^k(s, t))`.
    pub fn components(&self) -> impl Iterator<Item = ((i64, i64, i64), &IntMatrix)> {
        self.comps.iter()
    }

    pub(crate) fn comps(&self) -> &Components {
        &self.comps
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &MulticomplexMap) -> Result<MulticomplexMap> {
        if self.target != next.source {
            return Err(Error::InvalidInput(
                "composing multicomplex maps with mismatched endpoints".into(),
            ));
        }
        Ok(Self::from_components(
            self.source.clone(),
            next.target.clone(),
            Components::compose(&next.comps, &self.comps),
        ))
    }

    pub fn add(&self, other: &MulticomplexMap) -> Result<MulticomplexMap> {
        self.same_endpoints(other)?;
        Ok(Self::from_components(
            self.source.clone(),
            self.target.clone(),
            self.comps.add(&other.comps),
        ))
    }

    pub fn sub(&self, other: &MulticomplexMap) -> Result<MulticomplexMap> {
        self.same_endpoints(other)?;
        Ok(Self::from_components(
            self.source.clone(),
            self.target.clone(),
            self.comps.sub(&other.comps),
        ))
    }

    pub(crate) fn same_endpoints(&self, other: &MulticomplexMap) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::InvalidInput("maps have different endpoints".into()));
        }
        Ok(())
    }

    /// The differential defect `d_B f − f d_A`.
    pub(crate) fn chain_defect(&self) -> Components {
        Components::compose(self.target.diff(), &self.comps)
            .sub(&Components::compose(&self.comps, self.source.diff()))
    }
}

/// `d_B · f = f · d_A` on every bidegree. Filtration is enforced on construction.
pub fn check_mc_map(f: &MulticomplexMap) -> bool {
    f.chain_defect().is_zero()
}

pub fn total_map(f: &MulticomplexMap) -> ChainMap {
    let src = f.source.total_layout();
    let tgt = f.target.total_layout();
    let source = super::total_complex(&f.source);
    let target = super::total_complex(&f.target);
    let components = src
        .degrees()
        .map(|n| (n, assemble(&src, &tgt, &f.comps, n)))
        .collect();
    ChainMap::new(source, target, components).expect("assembled blocks have consistent shapes")
}
