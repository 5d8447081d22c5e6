use std::borrow::Cow;
use std::collections::BTreeMap;

use super::{assemble, Components, MulticomplexMap};
use crate::complex::ChainHomotopy;
use crate::linalg::{solve_linear, IntMatrix};
use crate::{Error, Result};

/// A degree −1 map lowering the column filtration by at most one:
/// components `s^k(i, j): A^{i,j} → B^{i+k, j−k−1}` with `k ≥ −1`,
/// witnessing `from − to = d_B s + s d_A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MulticomplexHomotopy {
    from: MulticomplexMap,
    to: MulticomplexMap,
    comps: Components,
}

impl MulticomplexHomotopy {
    pub fn new(
        from: MulticomplexMap,
        to: MulticomplexMap,
        components: BTreeMap<(i64, i64, i64), IntMatrix>,
    ) -> Result<Self> {
        from.same_endpoints(&to)?;
        let comps = checked_components(&from, components)?;
        Ok(MulticomplexHomotopy { from, to, comps })
    }

    pub(crate) fn from_components(
        from: MulticomplexMap,
        to: MulticomplexMap,
        comps: Components,
    ) -> Self {
        debug_assert_eq!(comps.offset(), -1);
        MulticomplexHomotopy { from, to, comps }
    }

    /// The homotopy from `f` to `f − (d s + s d)`; its witness holds by construction.
    pub fn plant(
        f: MulticomplexMap,
        components: BTreeMap<(i64, i64, i64), IntMatrix>,
    ) -> Result<Self> {
        let comps = checked_components(&f, components)?;
        let boundary = boundary(&f, &comps);
        let to = MulticomplexMap::from_components(
            f.source().clone(),
            f.target().clone(),
            f.comps().sub(&boundary),
        );
        Ok(MulticomplexHomotopy { from: f, to, comps })
    }

    pub fn zero(f: &MulticomplexMap) -> Self {
        Self::from_components(f.clone(), f.clone(), Components::new(-1))
    }

    pub fn from_map(&self) -> &MulticomplexMap {
        &self.from
    }

    pub fn to_map(&self) -> &MulticomplexMap {
        &self.to
    }

    pub fn component(&self, k: i64, i: i64, j: i64) -> Cow<'_, IntMatrix> {
        match self.comps.get(k, i, j) {
            Some(m) => Cow::Borrowed(m),
            None => Cow::Owned(IntMatrix::zeros(
                self.from.target().rank(i + k, j - k - 1),
                self.from.source().rank(i, j),
            )),
        }
    }

    pub fn component_mut(&mut self, k: i64, i: i64, j: i64) -> Option<&mut IntMatrix> {
        self.comps.get_mut(k, i, j)
    }

    /// Stored components as `((k, i, j), s^k(i, j))`.
    pub fn components(&self) -> impl Iterator<Item = ((i64, i64, i64), &IntMatrix)> {
        self.comps.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_zero()
    }

    /// `F ∘ s`, a homotopy from `F ∘ from` to `F ∘ to`.
    pub fn then_map(&self, next: &MulticomplexMap) -> Result<MulticomplexHomotopy> {
        Ok(MulticomplexHomotopy {
            from: self.from.then(next)?,
            to: self.to.then(next)?,
            comps: Components::compose(next.comps(), &self.comps),
        })
    }

    /// `s ∘ G`, a homotopy from `from ∘ G` to `to ∘ G`.
    pub fn after_map(&self, prev: &MulticomplexMap) -> Result<MulticomplexHomotopy> {
        Ok(MulticomplexHomotopy {
            from: prev.then(&self.from)?,
            to: prev.then(&self.to)?,
            comps: Components::compose(&self.comps, prev.comps()),
        })
    }

    /// The raw components, without endpoints.
    pub(crate) fn comps(&self) -> &Components {
        &self.comps
    }
}

fn checked_components(
    f: &MulticomplexMap,
    components: BTreeMap<(i64, i64, i64), IntMatrix>,
) -> Result<Components> {
    let mut comps = Components::new(-1);
    for ((k, i, j), m) in components {
        if k < -1 {
            return Err(Error::FiltrationViolation(format!(
                "homotopy component s^{k} at ({i},{j}) lowers the filtration by more than one"
            )));
        }
        let expected = (f.target().rank(i + k, j - k - 1), f.source().rank(i, j));
        if m.shape() != expected {
            return Err(Error::DimensionMismatch(format!(
                "s^{k}({i},{j}) is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                expected.0,
                expected.1
            )));
        }
        comps.insert(k, i, j, m);
    }
    Ok(comps)
}

/// `d_B s + s d_A` for the endpoints of `f`.
fn boundary(f: &MulticomplexMap, s: &Components) -> Components {
    Components::compose(f.target().diff(), s).add(&Components::compose(s, f.source().diff()))
}

pub fn check_mc_homotopy(s: &MulticomplexHomotopy) -> bool {
    s.from
        .comps()
        .sub(s.to.comps())
        .sub(&boundary(&s.from, &s.comps))
        .is_zero()
}

pub fn total_homotopy(s: &MulticomplexHomotopy) -> ChainHomotopy {
    let src = s.from.source().total_layout();
    let tgt = s.from.target().total_layout();
    let components = src
        .degrees()
        .map(|n| (n, assemble(&src, &tgt, &s.comps, n)))
        .collect();
    ChainHomotopy::new(
        super::total_map(&s.from),
        super::total_map(&s.to),
        components,
    )
    .expect("assembled blocks have consistent shapes")
}

/// Decides whether `f ≃ g` as multicomplex maps.
///
/// All admissible homotopy entries are unknowns and the witness equation is
/// imposed on every bidegree; the resulting integer system is solved exactly,
/// so `None` certifies that no homotopy exists.
pub fn find_homotopy(
    f: &MulticomplexMap,
    g: &MulticomplexMap,
) -> Result<Option<MulticomplexHomotopy>> {
    f.same_endpoints(g)?;
    let source = f.source();
    let target = f.target();
    let Some((_, col_max)) = target.column_range() else {
        return Ok(Some(MulticomplexHomotopy::zero(f).with_to(g.clone())));
    };

    // unknown blocks s^k(i,j), shape b × a
    let mut unknowns: BTreeMap<(i64, i64, i64), (usize, usize, usize)> = BTreeMap::new();
    let mut equations: BTreeMap<(i64, i64, i64), (usize, usize, usize)> = BTreeMap::new();
    let (mut n_unknowns, mut n_equations) = (0, 0);
    for (&(i, j), &a) in source.ranks() {
        for k in -1..=(col_max - i) {
            let b = target.rank(i + k, j - k - 1);
            if b > 0 {
                unknowns.insert((k, i, j), (n_unknowns, b, a));
                n_unknowns += a * b;
            }
            let b = target.rank(i + k, j - k);
            if b > 0 {
                equations.insert((k, i, j), (n_equations, b, a));
                n_equations += a * b;
            }
        }
    }

    let mut system = IntMatrix::zeros(n_equations, n_unknowns);
    let mut place = |eq: (i64, i64, i64), unk: (i64, i64, i64), block: IntMatrix| -> Result<()> {
        let (row, _, _) = *equations
            .get(&eq)
            .ok_or_else(|| Error::Internal(format!("homotopy equation {eq:?} missing")))?;
        let (col, _, _) = unknowns[&unk];
        system.add_block(row, col, &block);
        Ok(())
    };
    // d_B · s^k(i,j)
    for (&(k, i, j), &(_, b, a)) in &unknowns {
        let (ti, tj) = (i + k, j - k - 1);
        for ((r, di, dj), d) in target.diff().iter() {
            if (di, dj) == (ti, tj) {
                debug_assert_eq!(d.cols(), b);
                place((k + r, i, j), (k, i, j), IntMatrix::identity(a).kron(d))?;
            }
        }
    }
    // s^k(i',j') · d_A^r(i,j) where d_A^r(i,j) lands in (i',j')
    for ((r, i, j), d) in source.diff().iter() {
        let (si, sj) = (i + r, j - r + 1);
        for (&(k, ui, uj), &(_, b, _)) in unknowns.iter() {
            if (ui, uj) != (si, sj) {
                continue;
            }
            place(
                (k + r, i, j),
                (k, si, sj),
                d.transpose().kron(&IntMatrix::identity(b)),
            )?;
        }
    }

    let defect = f.comps().sub(g.comps());
    let mut rhs = IntMatrix::zeros(n_equations, 1);
    for ((n, i, j), block) in defect.iter() {
        let Some(&(row, b, _)) = equations.get(&(n, i, j)) else {
            if block.is_zero() {
                continue;
            }
            return Err(Error::Internal(format!(
                "map defect outside equation set at {n},{i},{j}"
            )));
        };
        for c in 0..block.cols() {
            for r in 0..block.rows() {
                rhs.set(row + c * b + r, 0, block.get(r, c).clone());
            }
        }
    }

    let Some(x) = solve_linear(&system, &rhs)? else {
        return Ok(None);
    };
    let mut comps = Components::new(-1);
    for (&(k, i, j), &(offset, b, a)) in &unknowns {
        let block = IntMatrix::from_fn(b, a, |r, c| x.get(offset + c * b + r, 0).clone());
        comps.insert(k, i, j, block);
    }
    Ok(Some(MulticomplexHomotopy::from_components(
        f.clone(),
        g.clone(),
        comps,
    )))
}

impl MulticomplexHomotopy {
    fn with_to(mut self, to: MulticomplexMap) -> Self {
        self.to = to;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{check_homotopy_witness, ChainComplex};
    use crate::multicomplex::{embed_complex, Multicomplex};

    fn two_column() -> Multicomplex {
        let mut c =
            Multicomplex::new([((-1, 1), 1), ((0, 1), 1), ((-1, 0), 2), ((0, 0), 1)].into());
        c.set_component(1, -1, 1, IntMatrix::from_rows(&[[2]]))
            .unwrap();
        c.set_component(1, -1, 0, IntMatrix::from_rows(&[[1, 3]]))
            .unwrap();
        c
    }

    #[test]
    fn equal_maps_get_zero_homotopy() {
        let c = two_column();
        let id = MulticomplexMap::identity(&c);
        let s = find_homotopy(&id, &id).unwrap().unwrap();
        assert!(s.is_zero());
        assert!(check_mc_homotopy(&s));
    }

    #[test]
    fn planted_homotopy_is_recovered() {
        let c = two_column();
        let id = MulticomplexMap::identity(&c);
        let planted = MulticomplexHomotopy::plant(
            id.clone(),
            [
                ((-1, 0, 1), IntMatrix::from_rows(&[[1]])),
                ((-1, 0, 0), IntMatrix::from_rows(&[[2], [-1]])),
            ]
            .into(),
        )
        .unwrap();
        assert!(check_mc_homotopy(&planted));
        assert!(check_homotopy_witness(&total_homotopy(&planted)));
        let found = find_homotopy(planted.from_map(), planted.to_map())
            .unwrap()
            .unwrap();
        assert!(check_mc_homotopy(&found));

        let mut corrupted = planted.clone();
        *corrupted.component_mut(-1, 0, 1).unwrap().entry_mut(0, 0) += 1;
        assert!(!check_mc_homotopy(&corrupted));
    }

    #[test]
    fn identity_not_nullhomotopic_on_point() {
        let point = embed_complex(&ChainComplex::free_in_degree(0, 1));
        let id = MulticomplexMap::identity(&point);
        let zero = MulticomplexMap::zero(&point, &point);
        assert!(find_homotopy(&id, &zero).unwrap().is_none());
    }

    #[test]
    fn too_low_component_rejected() {
        let c = two_column();
        let id = MulticomplexMap::identity(&c);
        let r = MulticomplexHomotopy::new(
            id.clone(),
            id,
            [((-2, 0, 1), IntMatrix::zeros(0, 1))].into(),
        );
        assert!(matches!(r, Err(Error::FiltrationViolation(_))));
    }
}
