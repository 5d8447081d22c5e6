//! JSON documents for complexes, multicomplexes, groups, maps, homotopies and
//! resolutions.
//!
//! Every document is an object with `"format_version": 1` and a `"kind"` tag.
//! Degrees are object keys (`"j"` or `"i,j"`), matrices are row-major arrays
//! of integer rows. The canonical text of a document has sorted keys, no
//! insignificant whitespace and integers in decimal; [`Document::to_canonical`]
//! produces it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::{Map, Number, Value};

use crate::complex::{homology_at, validate_complex, ChainComplex, ChainMap};
use crate::linalg::{FgAbGroup, GroupMorphism, IntMatrix};
use crate::multicomplex::{embed_complex, Multicomplex, MulticomplexHomotopy, MulticomplexMap};
use crate::resolution::{AugmentedRowResolution, HomologicalResolution};
use crate::{Error, Result};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Complex(ChainComplex),
    Multicomplex(Multicomplex),
    Group(FgAbGroup),
    ChainMap(ChainMap),
    McMap(MulticomplexMap),
    Homotopy(MulticomplexHomotopy),
    Resolution(HomologicalResolution),
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Complex(_) => "complex",
            Document::Multicomplex(_) => "multicomplex",
            Document::Group(_) => "group",
            Document::ChainMap(_) => "chain_map",
            Document::McMap(_) => "mc_map",
            Document::Homotopy(_) => "homotopy",
            Document::Resolution(_) => "resolution",
        }
    }

    pub fn parse(text: &str) -> Result<Document> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
        Document::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Document> {
        let obj = value
            .as_object()
            .ok_or_else(|| malformed("document must be a JSON object"))?;
        match obj.get("format_version").and_then(Value::as_u64) {
            Some(FORMAT_VERSION) => {}
            Some(v) => return Err(malformed(format!("unsupported format_version {v}"))),
            None => return Err(malformed("missing format_version")),
        }
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| malformed("missing kind"))?;
        Ok(match kind {
            "complex" => Document::Complex(complex_from(obj)?),
            "multicomplex" => Document::Multicomplex(multicomplex_from(obj)?),
            "group" => Document::Group(group_from(obj)?),
            "chain_map" => Document::ChainMap(chain_map_from(obj)?),
            "mc_map" => Document::McMap(mc_map_from(obj)?),
            "homotopy" => Document::Homotopy(homotopy_from(obj)?),
            "resolution" => Document::Resolution(resolution_from(obj)?),
            other => return Err(malformed(format!("unknown kind {other:?}"))),
        })
    }

    pub fn to_value(&self) -> Value {
        let (mut obj, kind) = match self {
            Document::Complex(c) => (complex_fields(c), "complex"),
            Document::Multicomplex(c) => (multicomplex_fields(c), "multicomplex"),
            Document::Group(g) => (group_fields(g), "group"),
            Document::ChainMap(f) => (chain_map_fields(f), "chain_map"),
            Document::McMap(f) => (mc_map_fields(f), "mc_map"),
            Document::Homotopy(s) => (homotopy_fields(s), "homotopy"),
            Document::Resolution(r) => (resolution_fields(r), "resolution"),
        };
        obj.insert("format_version".into(), Value::from(FORMAT_VERSION));
        obj.insert("kind".into(), Value::from(kind));
        Value::Object(obj)
    }

    /// Sorted keys, compact, integers in decimal.
    pub fn to_canonical(&self) -> String {
        serde_json::to_string(&self.to_value()).expect("values always serialize")
    }
}

macro_rules! expect_kind {
    ($name:ident, $variant:ident, $ty:ty, $label:literal) => {
        impl Document {
            pub fn $name(self) -> Result<$ty> {
                match self {
                    Document::$variant(x) => Ok(x),
                    other => Err(malformed(format!(
                        "expected a {} document, found {}",
                        $label,
                        other.kind()
                    ))),
                }
            }
        }
    };
}

expect_kind!(into_complex, Complex, ChainComplex, "complex");
expect_kind!(
    into_multicomplex,
    Multicomplex,
    Multicomplex,
    "multicomplex"
);
expect_kind!(into_group, Group, FgAbGroup, "group");
expect_kind!(into_chain_map, ChainMap, ChainMap, "chain_map");
expect_kind!(into_mc_map, McMap, MulticomplexMap, "mc_map");
expect_kind!(into_homotopy, Homotopy, MulticomplexHomotopy, "homotopy");
expect_kind!(
    into_resolution,
    Resolution,
    HomologicalResolution,
    "resolution"
);

// ---- values ----

fn int_value(x: &BigInt) -> Value {
    Value::Number(
        x.to_string()
            .parse::<Number>()
            .expect("decimal integers are JSON numbers"),
    )
}

fn matrix_value(m: &IntMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array(m.row(r).iter().map(int_value).collect()))
            .collect(),
    )
}

fn bidegree_key(i: i64, j: i64) -> String {
    format!("{i},{j}")
}

fn graded<'a>(entries: impl Iterator<Item = (String, Value)> + 'a) -> Value {
    Value::Object(entries.collect())
}

/// `{"k": {"i,j": M}}` for components keyed `(k, i, j)`.
fn shifted_components<'a>(
    entries: impl Iterator<Item = ((i64, i64, i64), &'a IntMatrix)>,
) -> Value {
    let mut by_shift: BTreeMap<i64, Map<String, Value>> = BTreeMap::new();
    for ((k, i, j), m) in entries {
        by_shift
            .entry(k)
            .or_default()
            .insert(bidegree_key(i, j), matrix_value(m));
    }
    graded(
        by_shift
            .into_iter()
            .map(|(k, m)| (k.to_string(), Value::Object(m))),
    )
}

fn complex_fields(c: &ChainComplex) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert(
        "ranks".into(),
        graded(
            c.ranks()
                .iter()
                .map(|(j, r)| (j.to_string(), Value::from(*r))),
        ),
    );
    obj.insert(
        "diff".into(),
        graded(
            c.diffs()
                .iter()
                .map(|(j, d)| (j.to_string(), matrix_value(d))),
        ),
    );
    obj
}

fn multicomplex_fields(c: &Multicomplex) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert(
        "ranks".into(),
        graded(
            c.ranks()
                .iter()
                .map(|(&(i, j), r)| (bidegree_key(i, j), Value::from(*r))),
        ),
    );
    obj.insert(
        "components".into(),
        shifted_components(c.components().map(|((r, i, j), m)| ((r as i64, i, j), m))),
    );
    obj
}

fn group_fields(g: &FgAbGroup) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert("generators".into(), Value::from(g.generator_count()));
    obj.insert("relations".into(), matrix_value(g.relations()));
    obj
}

fn chain_map_fields(f: &ChainMap) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert(
        "source".into(),
        Document::Complex(f.source().clone()).to_value(),
    );
    obj.insert(
        "target".into(),
        Document::Complex(f.target().clone()).to_value(),
    );
    obj.insert(
        "components".into(),
        graded(
            f.components()
                .iter()
                .map(|(j, m)| (j.to_string(), matrix_value(m))),
        ),
    );
    obj
}

fn mc_map_fields(f: &MulticomplexMap) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert(
        "source".into(),
        Document::Multicomplex(f.source().clone()).to_value(),
    );
    obj.insert(
        "target".into(),
        Document::Multicomplex(f.target().clone()).to_value(),
    );
    obj.insert("components".into(), shifted_components(f.components()));
    obj
}

fn homotopy_fields(s: &MulticomplexHomotopy) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert(
        "from".into(),
        Document::McMap(s.from_map().clone()).to_value(),
    );
    obj.insert("to".into(), Document::McMap(s.to_map().clone()).to_value());
    obj.insert("components".into(), shifted_components(s.components()));
    obj
}

fn resolution_fields(r: &HomologicalResolution) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert(
        "complex".into(),
        Document::Complex(r.complex().clone()).to_value(),
    );
    obj.insert(
        "multicomplex".into(),
        Document::Multicomplex(r.multicomplex().clone()).to_value(),
    );
    obj.insert("phi".into(), shifted_components(r.phi().components()));
    obj.insert(
        "rho".into(),
        graded(
            r.rows()
                .iter()
                .map(|(j, row)| (j.to_string(), matrix_value(row.rho().matrix()))),
        ),
    );
    obj
}

// ---- parsing ----

fn check_keys(obj: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
    for key in obj.keys() {
        if key != "format_version" && key != "kind" && !allowed.contains(&key.as_str()) {
            return Err(malformed(format!("unexpected field {key:?}")));
        }
    }
    Ok(())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| malformed(format!("missing field {key:?}")))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| malformed(format!("{what} must be an object")))
}

fn parse_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .to_string()
            .parse::<BigInt>()
            .map_err(|_| malformed(format!("{n} is not an integer"))),
        other => Err(malformed(format!("{other} is not an integer"))),
    }
}

fn parse_count(v: &Value) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| malformed(format!("{v} is not a nonnegative integer")))
}

fn parse_degree(key: &str) -> Result<i64> {
    key.parse()
        .map_err(|_| malformed(format!("{key:?} is not a degree")))
}

fn parse_bidegree(key: &str) -> Result<(i64, i64)> {
    let (i, j) = key
        .split_once(',')
        .ok_or_else(|| malformed(format!("{key:?} is not a bidegree \"i,j\"")))?;
    Ok((parse_degree(i)?, parse_degree(j)?))
}

/// Parses a row-major matrix. With an expected shape, empty arrays stand
/// for matrices with no rows or no columns.
fn parse_matrix(v: &Value, shape: Option<(usize, usize)>) -> Result<IntMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| malformed("matrix must be an array of rows"))?;
    let cols = match (shape, rows.first()) {
        (Some((_, c)), _) => c,
        (None, Some(first)) => first.as_array().map_or(0, Vec::len),
        (None, None) => 0,
    };
    if let Some((r, _)) = shape {
        if rows.len() != r {
            return Err(malformed(format!(
                "matrix has {} rows, expected {r}",
                rows.len()
            )));
        }
    }
    let mut data = Vec::with_capacity(rows.len() * cols);
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| malformed("matrix rows must be arrays"))?;
        if row.len() != cols {
            return Err(malformed(format!(
                "matrix row has {} entries, expected {cols}",
                row.len()
            )));
        }
        for x in row {
            data.push(parse_int(x)?);
        }
    }
    Ok(IntMatrix::from_vec(rows.len(), cols, data))
}

fn complex_from(obj: &Map<String, Value>) -> Result<ChainComplex> {
    check_keys(obj, &["ranks", "diff"])?;
    let mut ranks = BTreeMap::new();
    for (k, v) in object(field(obj, "ranks")?, "ranks")? {
        ranks.insert(parse_degree(k)?, parse_count(v)?);
    }
    let rank = |j: i64| ranks.get(&j).copied().unwrap_or(0);
    let mut diffs = BTreeMap::new();
    if let Some(d) = obj.get("diff") {
        for (k, v) in object(d, "diff")? {
            let j = parse_degree(k)?;
            diffs.insert(j, parse_matrix(v, Some((rank(j + 1), rank(j))))?);
        }
    }
    ChainComplex::new(ranks, diffs)
}

/// Parses `{"k": {"i,j": M}}` with shapes from `shape(k, i, j)`.
fn parse_shifted(
    v: &Value,
    shape: impl Fn(i64, i64, i64) -> (usize, usize),
) -> Result<BTreeMap<(i64, i64, i64), IntMatrix>> {
    let mut out = BTreeMap::new();
    for (k, inner) in object(v, "components")? {
        let k = parse_degree(k)?;
        for (b, m) in object(inner, "components")? {
            let (i, j) = parse_bidegree(b)?;
            out.insert((k, i, j), parse_matrix(m, Some(shape(k, i, j)))?);
        }
    }
    Ok(out)
}

fn multicomplex_from(obj: &Map<String, Value>) -> Result<Multicomplex> {
    check_keys(obj, &["ranks", "components"])?;
    let mut ranks = BTreeMap::new();
    for (k, v) in object(field(obj, "ranks")?, "ranks")? {
        ranks.insert(parse_bidegree(k)?, parse_count(v)?);
    }
    let mut c = Multicomplex::new(ranks);
    if let Some(v) = obj.get("components") {
        let comps = parse_shifted(v, |r, i, j| (c.rank(i + r, j - r + 1), c.rank(i, j)))?;
        for ((r, i, j), m) in comps {
            if r < 0 {
                return Err(malformed(format!("negative component index d^{r}")));
            }
            c.set_component(r as usize, i, j, m)?;
        }
    }
    Ok(c)
}

fn group_from(obj: &Map<String, Value>) -> Result<FgAbGroup> {
    check_keys(obj, &["generators", "relations"])?;
    let n = parse_count(field(obj, "generators")?)?;
    let relations = match obj.get("relations") {
        Some(v) => {
            let m = parse_matrix(v, None)?;
            if n > 0 && m.rows() == 0 {
                IntMatrix::zeros(n, 0)
            } else {
                m
            }
        }
        None => IntMatrix::zeros(n, 0),
    };
    FgAbGroup::new(n, relations)
}

fn nested(obj: &Map<String, Value>, key: &str) -> Result<Document> {
    Document::from_value(field(obj, key)?)
}

fn chain_map_from(obj: &Map<String, Value>) -> Result<ChainMap> {
    check_keys(obj, &["source", "target", "components"])?;
    let source = nested(obj, "source")?.into_complex()?;
    let target = nested(obj, "target")?.into_complex()?;
    let mut comps = BTreeMap::new();
    if let Some(v) = obj.get("components") {
        for (k, m) in object(v, "components")? {
            let j = parse_degree(k)?;
            comps.insert(j, parse_matrix(m, Some((target.rank(j), source.rank(j))))?);
        }
    }
    ChainMap::new(source, target, comps)
}

fn mc_map_from(obj: &Map<String, Value>) -> Result<MulticomplexMap> {
    check_keys(obj, &["source", "target", "components"])?;
    let source = nested(obj, "source")?.into_multicomplex()?;
    let target = nested(obj, "target")?.into_multicomplex()?;
    let comps = match obj.get("components") {
        Some(v) => parse_shifted(v, |k, s, t| (target.rank(s + k, t - k), source.rank(s, t)))?,
        None => BTreeMap::new(),
    };
    MulticomplexMap::new(source, target, comps)
}

fn homotopy_from(obj: &Map<String, Value>) -> Result<MulticomplexHomotopy> {
    check_keys(obj, &["from", "to", "components"])?;
    let from = nested(obj, "from")?.into_mc_map()?;
    let to = nested(obj, "to")?.into_mc_map()?;
    let comps = match obj.get("components") {
        Some(v) => parse_shifted(v, |k, i, j| {
            (
                from.target().rank(i + k, j - k - 1),
                from.source().rank(i, j),
            )
        })?,
        None => BTreeMap::new(),
    };
    MulticomplexHomotopy::new(from, to, comps)
}

fn resolution_from(obj: &Map<String, Value>) -> Result<HomologicalResolution> {
    check_keys(obj, &["complex", "multicomplex", "phi", "rho"])?;
    let complex = nested(obj, "complex")?.into_complex()?;
    if !validate_complex(&complex).is_empty() {
        return Err(Error::InvalidInput("resolved complex has d∘d ≠ 0".into()));
    }
    let c = nested(obj, "multicomplex")?.into_multicomplex()?;
    let target = embed_complex(&complex);
    let phi_comps = match obj.get("phi") {
        Some(v) => parse_shifted(v, |k, s, t| (target.rank(s + k, t - k), c.rank(s, t)))?,
        None => BTreeMap::new(),
    };
    let phi = MulticomplexMap::new(c.clone(), target, phi_comps)?;
    let mut rows = BTreeMap::new();
    for (k, v) in object(field(obj, "rho")?, "rho")? {
        let j = parse_degree(k)?;
        let h = homology_at(&complex, j);
        let rho = parse_matrix(v, Some((h.group.generator_count(), c.rank(0, j))))?;
        let columns: BTreeMap<i64, usize> = c
            .ranks()
            .iter()
            .filter(|(b, _)| b.1 == j)
            .map(|(&(i, _), &r)| (i, r))
            .collect();
        let d1 = columns
            .keys()
            .map(|&i| (i, c.component(1, i, j).into_owned()))
            .filter(|(i, _)| columns.contains_key(&(i + 1)))
            .collect();
        let row_complex = ChainComplex::new(columns, d1)?;
        let rho = GroupMorphism::new(FgAbGroup::free(c.rank(0, j)), h.group, rho)?;
        rows.insert(j, AugmentedRowResolution::new(j, row_complex, rho)?);
    }
    HomologicalResolution::from_parts(complex, c, phi, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolution::homological_resolution;

    fn two() -> ChainComplex {
        ChainComplex::from_parts(0, &[1, 1], vec![IntMatrix::from_rows(&[[2]])]).unwrap()
    }

    #[test]
    fn complex_text() {
        let doc = Document::Complex(two());
        let text = doc.to_canonical();
        assert_eq!(
            text,
            r#"{"diff":{"0":[[2]]},"format_version":1,"kind":"complex","ranks":{"0":1,"1":1}}"#
        );
        assert_eq!(Document::parse(&text).unwrap(), doc);
    }

    #[test]
    fn big_entries_survive() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let c = ChainComplex::new(
            [(0, 1), (1, 1)].into(),
            [(0, IntMatrix::from_vec(1, 1, vec![big.clone()]))].into(),
        )
        .unwrap();
        let text = Document::Complex(c.clone()).to_canonical();
        assert!(text.contains("123456789012345678901234567890"));
        assert_eq!(Document::parse(&text).unwrap().into_complex().unwrap(), c);
    }

    #[test]
    fn resolution_round_trip() {
        let res = homological_resolution(&two(), &[(1, 1)].into()).unwrap();
        let text = Document::Resolution(res.clone()).to_canonical();
        let back = Document::parse(&text).unwrap();
        assert_eq!(back.to_canonical(), text);
        assert_eq!(back.into_resolution().unwrap(), res);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        for text in [
            "[]",
            r#"{"kind":"complex","ranks":{}}"#,
            r#"{"format_version":2,"kind":"complex","ranks":{}}"#,
            r#"{"format_version":1,"kind":"cube"}"#,
            r#"{"format_version":1,"kind":"complex","ranks":{"0":1,"1":1},"diff":{"0":[[1,2]]}}"#,
            r#"{"format_version":1,"kind":"complex","ranks":{"0":1},"diff":{},"extra":0}"#,
            r#"{"format_version":1,"kind":"complex","ranks":{"0":1,"1":1},"diff":{"0":[[1.5]]}}"#,
            r#"{"format_version":1,"kind":"multicomplex","ranks":{"0":1}}"#,
            r#"{"format_version":1,"kind":"group","generators":2,"relations":[[1],[2,3]]}"#,
        ] {
            assert!(
                matches!(
                    Document::parse(text),
                    Err(Error::InvalidInput(_) | Error::DimensionMismatch(_))
                ),
                "{text}"
            );
        }
    }

    #[test]
    fn group_text() {
        let g = FgAbGroup::new(2, IntMatrix::from_rows(&[[2], [0]])).unwrap();
        let text = Document::Group(g.clone()).to_canonical();
        assert_eq!(
            text,
            r#"{"format_version":1,"generators":2,"kind":"group","relations":[[2],[0]]}"#
        );
        assert_eq!(Document::parse(&text).unwrap().into_group().unwrap(), g);
        let free = Document::Group(FgAbGroup::free(2)).to_canonical();
        assert_eq!(
            Document::parse(&free).unwrap().into_group().unwrap(),
            FgAbGroup::free(2)
        );
    }
}
