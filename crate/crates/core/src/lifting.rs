//! Lifting maps out of homological multicomplexes through quasi-isomorphisms,
//! homotopies between lifts, and induced maps between resolutions.
//!
//! Every construction runs over the columns of the source `C` from 0 down to
//! its lowest column. At a source block `C^{c,j}` all unknown components are
//! composed on the left, so the equations for that block form one integer
//! system `L·U = R` whose right-hand side has one column per basis vector
//! of `C^{c,j}`.

use std::collections::BTreeMap;

use crate::complex::ChainMap;
use crate::linalg::{solve_linear, IntMatrix};
use crate::multicomplex::{
    embed_complex, is_homological, Components, Multicomplex, MulticomplexHomotopy, MulticomplexMap,
};
use crate::resolution::HomologicalResolution;
use crate::{Error, Result};

/// A map `g: C → X` together with a homotopy from `F ∘ g` to the map it lifts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    pub map: MulticomplexMap,
    pub homotopy: MulticomplexHomotopy,
}

/// Blocks of a sparse linear system with block rows `R` and block columns `K`.
struct BlockSystem<R: Ord, K: Ord> {
    rows: BTreeMap<R, usize>,
    cols: BTreeMap<K, usize>,
    width: usize,
    lhs: Vec<(R, K, IntMatrix)>,
    rhs: Vec<(R, IntMatrix)>,
}

impl<R: Ord + Copy, K: Ord + Copy> BlockSystem<R, K> {
    fn new(width: usize) -> Self {
        BlockSystem {
            rows: BTreeMap::new(),
            cols: BTreeMap::new(),
            width,
            lhs: Vec::new(),
            rhs: Vec::new(),
        }
    }

    fn unknown(&mut self, key: K, size: usize) {
        if size > 0 {
            self.cols.insert(key, size);
        }
    }

    fn has_unknown(&self, key: &K) -> bool {
        self.cols.contains_key(key)
    }

    /// Adds `coefficient · unknown[key]` to block row `row`.
    fn term(&mut self, row: R, key: K, coefficient: IntMatrix) {
        if coefficient.rows() == 0 || !self.cols.contains_key(&key) {
            return;
        }
        self.rows.insert(row, coefficient.rows());
        self.lhs.push((row, key, coefficient));
    }

    /// Adds a known block to the right-hand side of block row `row`.
    fn known(&mut self, row: R, value: IntMatrix) {
        if value.rows() == 0 {
            return;
        }
        self.rows.insert(row, value.rows());
        self.rhs.push((row, value));
    }

    /// Solves the system; `None` when it has no integer solution.
    fn solve(&self) -> Result<Option<BTreeMap<K, IntMatrix>>> {
        let (row_at, height) = offsets(&self.rows);
        let (col_at, breadth) = offsets(&self.cols);
        let mut lhs = IntMatrix::zeros(height, breadth);
        for (r, k, m) in &self.lhs {
            lhs.add_block(row_at[r], col_at[k], m);
        }
        let mut rhs = IntMatrix::zeros(height, self.width);
        for (r, m) in &self.rhs {
            rhs.add_block(row_at[r], 0, m);
        }
        let Some(x) = solve_linear(&lhs, &rhs)? else {
            return Ok(None);
        };
        Ok(Some(
            self.cols
                .iter()
                .map(|(&k, &s)| (k, x.select_rows(col_at[&k]..col_at[&k] + s)))
                .collect(),
        ))
    }
}

fn offsets<T: Ord + Copy>(sizes: &BTreeMap<T, usize>) -> (BTreeMap<T, usize>, usize) {
    let mut total = 0;
    let map = sizes
        .iter()
        .map(|(&k, &s)| {
            let o = total;
            total += s;
            (k, o)
        })
        .collect();
    (map, total)
}

/// Nonzero components `(r, d^r(i, j))` leaving bidegree `(i, j)`.
fn outgoing(comps: &Components, i: i64, j: i64) -> Vec<(i64, &IntMatrix)> {
    comps
        .iter()
        .filter(|&((_, si, sj), m)| (si, sj) == (i, j) && !m.is_zero())
        .map(|((r, _, _), m)| (r, m))
        .collect()
}

fn index_by_source(comps: &Components) -> BTreeMap<(i64, i64), Vec<(i64, &IntMatrix)>> {
    let mut out: BTreeMap<(i64, i64), Vec<(i64, &IntMatrix)>> = BTreeMap::new();
    for ((k, i, j), m) in comps.iter() {
        if !m.is_zero() {
            out.entry((i, j)).or_default().push((k, m));
        }
    }
    out
}

fn check_source(c: &Multicomplex) -> Result<()> {
    if !is_homological(c) {
        return Err(Error::InvalidInput(
            "source of a lift must be a homological multicomplex".into(),
        ));
    }
    Ok(())
}

/// Column range `(lowest, highest)` of a multicomplex, `(0, −1)` when empty.
fn columns(c: &Multicomplex) -> (i64, i64) {
    c.column_range().unwrap_or((0, -1))
}

/// Lifts `gbar: C → Y` through a quasi-isomorphism `F: X → Y` of
/// multicomplexes, returning `g: C → X` and a homotopy from `F ∘ g` to `gbar`.
///
/// At each source block the chain-map equations for `g` and the witness
/// equations for the homotopy are solved together; an unsolvable block
/// means `Tot(F)` is not a quasi-isomorphism.
pub fn lift_through(f: &MulticomplexMap, gbar: &MulticomplexMap) -> Result<Lift> {
    if gbar.target() != f.target() {
        return Err(Error::InvalidInput(
            "map to lift must land in the target of F".into(),
        ));
    }
    let c = gbar.source();
    check_source(c)?;
    let (x, y) = (f.source(), f.target());
    let (clo, chi) = columns(c);
    let x_top = columns(x).1;
    let y_top = columns(y).1;

    let d_c = index_by_source(c.diff());
    let mut g = Components::new(0);
    let mut s = Components::new(-1);

    for col in (clo..=chi).rev() {
        let blocks: Vec<(i64, usize)> = c
            .ranks()
            .iter()
            .filter(|(b, _)| b.0 == col)
            .map(|(&(_, j), &p)| (j, p))
            .collect();
        for (j, p) in blocks {
            // rows: (0, target in X) chain equations, (1, target in Y) witness equations
            // cols: (0, k) for g^k, (1, k) for s^k
            let mut sys: BlockSystem<(u8, i64, i64), (u8, i64)> = BlockSystem::new(p);
            for k in 0..=(x_top - col) {
                sys.unknown((0, k), x.rank(col + k, j - k));
            }
            for k in -1..=(y_top - col) {
                sys.unknown((1, k), y.rank(col + k, j - k - 1));
            }

            for k in 0..=(x_top - col) {
                if !sys.has_unknown(&(0, k)) {
                    continue;
                }
                let (gi, gj) = (col + k, j - k);
                for (r, d) in outgoing(x.diff(), gi, gj) {
                    sys.term((0, gi + r, gj - r + 1), (0, k), d.clone());
                }
                for (a, fa) in outgoing(f.comps(), gi, gj) {
                    sys.term((1, gi + a, gj - a), (0, k), fa.clone());
                }
            }
            for k in -1..=(y_top - col) {
                if !sys.has_unknown(&(1, k)) {
                    continue;
                }
                let (si, sj) = (col + k, j - k - 1);
                for (r, d) in outgoing(y.diff(), si, sj) {
                    sys.term((1, si + r, sj - r + 1), (1, k), -d);
                }
            }

            // known terms from columns already lifted: g d_C and s d_C, and gbar
            for &(r, dc) in d_c.get(&(col, j)).map(Vec::as_slice).unwrap_or(&[]) {
                let (ni, nj) = (col + r, j - r + 1);
                for ((k, gi, gj), gm) in g.iter() {
                    if (gi, gj) == (ni, nj) {
                        sys.known((0, ni + k, nj - k), gm * dc);
                    }
                }
                for ((k, si, sj), sm) in s.iter() {
                    if (si, sj) == (ni, nj) {
                        sys.known((1, ni + k, nj - k - 1), sm * dc);
                    }
                }
            }
            for (m, gb) in outgoing(gbar.comps(), col, j) {
                sys.known((1, col + m, j - m), gb.clone());
            }

            let solution = sys
                .solve()?
                .ok_or(Error::QuasiIsoViolated { degree: col + j })?;
            for ((kind, k), m) in solution {
                if kind == 0 {
                    g.insert(k, col, j, m);
                } else {
                    s.insert(k, col, j, m);
                }
            }
        }
    }

    let map = MulticomplexMap::from_components(c.clone(), x.clone(), g);
    let homotopy = MulticomplexHomotopy::from_components(map.then(f)?, gbar.clone(), s);
    Ok(Lift { map, homotopy })
}

/// Lifts `gbar: C → B` (with `B` embedded in column 0) through a
/// quasi-isomorphism `f: A → B`.
pub fn lift_through_quasi_iso(f: &ChainMap, gbar: &MulticomplexMap) -> Result<Lift> {
    if !f.is_chain_map() {
        return Err(Error::InvalidInput("f is not a chain map".into()));
    }
    if gbar.target() != &embed_complex(f.target()) {
        return Err(Error::InvalidInput(
            "gbar must land in the target of f".into(),
        ));
    }
    lift_through(&MulticomplexMap::embed(f), gbar)
}

/// Given a quasi-isomorphism `F: X → Y`, maps `g, h: C → X`, and a homotopy
/// `s` from `F g` to `F h`, finds a homotopy `t` from `g` to `h`.
///
/// Alongside `t` a degree −2 correction `β` with `F t − s = d β − β d` is
/// solved at every block, which keeps later columns solvable.
pub fn homotopy_between_lifts_through(
    f: &MulticomplexMap,
    g: &MulticomplexMap,
    h: &MulticomplexMap,
    s: &MulticomplexHomotopy,
) -> Result<MulticomplexHomotopy> {
    g.same_endpoints(h)?;
    if g.target() != f.source() {
        return Err(Error::InvalidInput(
            "g and h must land in the source of F".into(),
        ));
    }
    if s.from_map() != &g.then(f)? || s.to_map() != &h.then(f)? {
        return Err(Error::InvalidInput("s must connect F∘g to F∘h".into()));
    }
    let c = g.source();
    check_source(c)?;
    let (x, y) = (f.source(), f.target());
    let (clo, chi) = columns(c);
    let x_top = columns(x).1;
    let y_top = columns(y).1;

    let d_c = index_by_source(c.diff());
    let defect = g.comps().sub(h.comps());
    let mut t = Components::new(-1);
    let mut beta = Components::new(-2);

    for col in (clo..=chi).rev() {
        let blocks: Vec<(i64, usize)> = c
            .ranks()
            .iter()
            .filter(|(b, _)| b.0 == col)
            .map(|(&(_, j), &p)| (j, p))
            .collect();
        for (j, p) in blocks {
            // rows: (0, target in X) for d t + t d = g − h, (1, target in Y) for F t − d β + β d = s
            // cols: (0, k) for t^k, (1, k) for β^k
            let mut sys: BlockSystem<(u8, i64, i64), (u8, i64)> = BlockSystem::new(p);
            for k in -1..=(x_top - col) {
                sys.unknown((0, k), x.rank(col + k, j - k - 1));
            }
            for k in -2..=(y_top - col) {
                sys.unknown((1, k), y.rank(col + k, j - k - 2));
            }
            for k in -1..=(x_top - col) {
                if !sys.has_unknown(&(0, k)) {
                    continue;
                }
                let (ti, tj) = (col + k, j - k - 1);
                for (r, d) in outgoing(x.diff(), ti, tj) {
                    sys.term((0, ti + r, tj - r + 1), (0, k), d.clone());
                }
                for (a, fa) in outgoing(f.comps(), ti, tj) {
                    sys.term((1, ti + a, tj - a), (0, k), fa.clone());
                }
            }
            for k in -2..=(y_top - col) {
                if !sys.has_unknown(&(1, k)) {
                    continue;
                }
                let (bi, bj) = (col + k, j - k - 2);
                for (r, d) in outgoing(y.diff(), bi, bj) {
                    sys.term((1, bi + r, bj - r + 1), (1, k), -d);
                }
            }

            for &(r, dc) in d_c.get(&(col, j)).map(Vec::as_slice).unwrap_or(&[]) {
                let (ni, nj) = (col + r, j - r + 1);
                for ((k, ti, tj), tm) in t.iter() {
                    if (ti, tj) == (ni, nj) {
                        sys.known((0, ni + k, nj - k - 1), -&(tm * dc));
                    }
                }
                for ((k, bi, bj), bm) in beta.iter() {
                    if (bi, bj) == (ni, nj) {
                        sys.known((1, ni + k, nj - k - 2), -&(bm * dc));
                    }
                }
            }
            for (n, dm) in outgoing(&defect, col, j) {
                sys.known((0, col + n, j - n), dm.clone());
            }
            for (m, sm) in outgoing(s.comps(), col, j) {
                sys.known((1, col + m, j - m - 1), sm.clone());
            }

            let solution = sys
                .solve()?
                .ok_or(Error::QuasiIsoViolated { degree: col + j })?;
            for ((kind, k), m) in solution {
                if kind == 0 {
                    t.insert(k, col, j, m);
                } else {
                    beta.insert(k, col, j, m);
                }
            }
        }
    }
    Ok(MulticomplexHomotopy::from_components(
        g.clone(),
        h.clone(),
        t,
    ))
}

/// [`homotopy_between_lifts_through`] for a quasi-isomorphism of chain complexes.
pub fn homotopy_between_lifts(
    f: &ChainMap,
    g: &MulticomplexMap,
    h: &MulticomplexMap,
    s: &MulticomplexHomotopy,
) -> Result<MulticomplexHomotopy> {
    if !f.is_chain_map() {
        return Err(Error::InvalidInput("f is not a chain map".into()));
    }
    homotopy_between_lifts_through(&MulticomplexMap::embed(f), g, h, s)
}

/// The map `g: C → C′` between resolutions induced by `f: A → A′`, with a
/// homotopy from `φ′ ∘ g` to `f ∘ φ`.
pub fn induced_resolution_map(
    res: &HomologicalResolution,
    res2: &HomologicalResolution,
    f: &ChainMap,
) -> Result<Lift> {
    if f.source() != res.complex() || f.target() != res2.complex() {
        return Err(Error::InvalidInput(
            "f must map the resolved complexes".into(),
        ));
    }
    let gbar = res.phi().then(&MulticomplexMap::embed(f))?;
    lift_through(res2.phi(), &gbar)
}
