//! Command-line front end. Exit codes: 0 success, 1 checked property false,
//! 2 malformed input, 3 internal invariant breach.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use homres::complex::{
    homology_at, induced_map_on_homology, validate_complex, ChainComplex, ChainMap,
};
use homres::derived::{hyper_derived_tensor, tor};
use homres::format::Document;
use homres::lifting::{induced_resolution_map, lift_through, lift_through_quasi_iso, Lift};
use homres::multicomplex::{
    check_mc_homotopy, check_mc_map, find_homotopy, is_homological, row_exactness_failures,
    total_complex, total_map, validate_multicomplex,
};
use homres::resolution::{homological_resolution, verify_resolution};
use homres::{Error, FgAbGroup};

#[derive(Debug, Parser)]
#[command(
    name = "homres",
    version,
    about = "Exact homological resolutions over the integers"
)]
pub struct Cli {
    /// Print a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a document: d∘d = 0, the multicomplex identity, chain-map and homotopy equations.
    Check {
        file: PathBuf,
        /// Also require a multicomplex to be homological.
        #[arg(long)]
        homological: bool,
    },
    /// Homology groups of a complex (or of the total complex of a multicomplex).
    Homology {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<i64>,
    },
    /// Decide whether a chain map (or the totalization of a multicomplex map) is a quasi-isomorphism.
    Qiso { file: PathBuf },
    /// Totalize a multicomplex or a multicomplex map.
    Tot {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build and verify the homological resolution of a complex.
    Resolve {
        file: PathBuf,
        /// Extra columns per row, e.g. `0=1,-1=2`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_padding)]
        pad: Option<BTreeMap<i64, usize>>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Lift a map out of a homological multicomplex through a quasi-isomorphism.
    Lift {
        /// The quasi-isomorphism (chain_map or mc_map).
        #[arg(short = 'f', long = "quasi-iso")]
        quasi_iso: PathBuf,
        /// The map to lift (mc_map).
        #[arg(short = 'g', long = "map")]
        map: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the homotopy witness.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Search for a homotopy between two multicomplex maps.
    Homotopy {
        f: PathBuf,
        g: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The map between resolutions induced by a chain map.
    InducedMap {
        source: PathBuf,
        target: PathBuf,
        map: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Tor_i(Z/a, Z/b); 0 stands for Z.
    Tor {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        i: usize,
    },
    /// Homology of the derived tensor product of a complex with a group.
    Hypertor {
        complex: PathBuf,
        group: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_padding)]
        pad: Option<BTreeMap<i64, usize>>,
    },
}

fn parse_padding(s: &str) -> Result<BTreeMap<i64, usize>, String> {
    let mut out = BTreeMap::new();
    for part in s.split(',').filter(|p| !p.is_empty()) {
        let (j, k) = part
            .split_once('=')
            .ok_or_else(|| format!("expected j=k, found {part:?}"))?;
        let j = j
            .trim()
            .parse()
            .map_err(|_| format!("bad row index {j:?}"))?;
        let k = k
            .trim()
            .parse()
            .map_err(|_| format!("bad column count {k:?}"))?;
        out.insert(j, k);
    }
    Ok(out)
}

/// Text lines plus a JSON value; `holds` is false when a checked property fails.
/// A document not written to a file is printed on standard output, and the
/// text report then moves to standard error.
struct Report {
    holds: bool,
    lines: Vec<String>,
    json: Value,
    document: Option<String>,
}

impl Report {
    fn new(holds: bool, lines: Vec<String>, json: Value) -> Self {
        Report {
            holds,
            lines,
            json,
            document: None,
        }
    }

    fn with_document(mut self, document: Option<String>) -> Self {
        self.document = document;
        self
    }
}

pub fn run(cli: &Cli) -> u8 {
    match execute(cli) {
        Ok(report) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string(&report.json).expect("values serialize")
                );
            } else if let Some(text) = &report.document {
                for line in &report.lines {
                    eprintln!("{line}");
                }
                println!("{text}");
            } else {
                for line in &report.lines {
                    println!("{line}");
                }
            }
            if report.holds {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let code = exit_code(&e);
            if cli.json {
                println!("{}", json!({"error": format!("{e:#}"), "exit_code": code}));
            } else {
                eprintln!("error: {e:#}");
            }
            code
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::QuasiIsoViolated { .. }) => 1,
        Some(Error::Internal(_)) => 3,
        _ => 2,
    }
}

fn load(path: &Path) -> anyhow::Result<Document> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Document::parse(&text)
        .map_err(anyhow::Error::from)
        .with_context(|| format!("parsing {}", path.display()))
}

/// Writes a document to `output`, or returns its text for standard output.
fn emit(
    doc: &Document,
    output: Option<&Path>,
    lines: &mut Vec<String>,
) -> anyhow::Result<(Value, Option<String>)> {
    let text = doc.to_canonical();
    match output {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            lines.push(format!(
                "wrote {} document to {}",
                doc.kind(),
                path.display()
            ));
            Ok((Value::from(path.display().to_string()), None))
        }
        None => Ok((doc.to_value(), Some(text))),
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn execute(cli: &Cli) -> anyhow::Result<Report> {
    match &cli.command {
        Command::Check { file, homological } => check(load(file)?, *homological),
        Command::Homology { file, degree } => homology(load(file)?, *degree),
        Command::Qiso { file } => qiso(load(file)?),
        Command::Tot { file, output } => {
            let doc = match load(file)? {
                Document::Multicomplex(c) => Document::Complex(total_complex(&c)),
                Document::McMap(f) => Document::ChainMap(total_map(&f)),
                other => {
                    return Err(anyhow!(
                        "tot expects a multicomplex or mc_map, found {}",
                        other.kind()
                    ))
                }
            };
            let mut lines = Vec::new();
            let (out, text) = emit(&doc, output.as_deref(), &mut lines)?;
            Ok(
                Report::new(true, lines, json!({"command": "tot", "output": out}))
                    .with_document(text),
            )
        }
        Command::Resolve { file, pad, output } => {
            let a = load(file)?.into_complex()?;
            let padding = pad.clone().unwrap_or_default();
            let res = homological_resolution(&a, &padding)?;
            let report = verify_resolution(&res);
            let mut lines = vec![
                format!(
                    "multicomplex identity: {}",
                    verdict(report.violations.is_empty())
                ),
                format!(
                    "homological (d0 = 0, rows exact): {}",
                    verdict(report.homological)
                ),
                format!(
                    "row augmentations onto H^j(A): {}",
                    verdict(report.row_failures.is_empty())
                ),
                format!("phi is a multicomplex map: {}", verdict(report.phi_is_map)),
                format!(
                    "Tot(phi) is a quasi-isomorphism: {}",
                    verdict(report.quasi_iso)
                ),
            ];
            if !report.passed() {
                return Err(Error::Internal(format!(
                    "constructed resolution failed verification: {report:?}"
                ))
                .into());
            }
            let (out, text) = emit(
                &Document::Resolution(res.clone()),
                output.as_deref(),
                &mut lines,
            )?;
            let c = res.multicomplex();
            Ok(Report::new(
                true,
                lines,
                json!({
                    "command": "resolve",
                    "checks": {
                        "multicomplex_identity": true,
                        "homological": true,
                        "row_augmentations": true,
                        "phi_map": true,
                        "quasi_iso": true,
                    },
                    "columns": c.column_range().map(|(lo, hi)| vec![lo, hi]),
                    "r_max": c.r_max(),
                    "output": out,
                }),
            )
            .with_document(text))
        }
        Command::Lift {
            quasi_iso,
            map,
            output,
            witness,
        } => {
            let gbar = load(map)?.into_mc_map()?;
            let lift = match load(quasi_iso)? {
                Document::ChainMap(f) => lift_through_quasi_iso(&f, &gbar)?,
                Document::McMap(f) => lift_through(&f, &gbar)?,
                other => {
                    return Err(anyhow!(
                        "expected chain_map or mc_map, found {}",
                        other.kind()
                    ))
                }
            };
            lift_report("lift", &lift, output.as_deref(), witness.as_deref())
        }
        Command::InducedMap {
            source,
            target,
            map,
            output,
            witness,
        } => {
            let res = load(source)?.into_resolution()?;
            let res2 = load(target)?.into_resolution()?;
            let f = load(map)?.into_chain_map()?;
            let lift = induced_resolution_map(&res, &res2, &f)?;
            lift_report("induced-map", &lift, output.as_deref(), witness.as_deref())
        }
        Command::Homotopy { f, g, output } => {
            let f = load(f)?.into_mc_map()?;
            let g = load(g)?.into_mc_map()?;
            let mut lines = Vec::new();
            match find_homotopy(&f, &g)? {
                Some(s) => {
                    lines.push(format!(
                        "homotopy found, witness verified: {}",
                        verdict(check_mc_homotopy(&s))
                    ));
                    let (out, text) = emit(&Document::Homotopy(s), output.as_deref(), &mut lines)?;
                    Ok(Report::new(
                        true,
                        lines,
                        json!({"command": "homotopy", "homotopic": true, "output": out}),
                    )
                    .with_document(text))
                }
                None => {
                    lines.push("no homotopy exists".into());
                    Ok(Report::new(
                        false,
                        lines,
                        json!({"command": "homotopy", "homotopic": false}),
                    ))
                }
            }
        }
        Command::Tor { a, b, i } => {
            let g = tor(&FgAbGroup::cyclic(*a), &FgAbGroup::cyclic(*b), *i)?;
            Ok(Report::new(
                true,
                vec![g.to_string()],
                json!({"command": "tor", "a": a, "b": b, "i": i, "group": group_json(&g)}),
            ))
        }
        Command::Hypertor {
            complex,
            group,
            pad,
        } => {
            let a = load(complex)?.into_complex()?;
            let m = load(group)?.into_group()?;
            let padding = pad.clone().unwrap_or_default();
            let result = hyper_derived_tensor(&a, &m, &padding)?;
            let lines = if result.homology.is_empty() {
                vec!["all homology vanishes".into()]
            } else {
                result
                    .homology
                    .iter()
                    .map(|(n, g)| format!("H^{n} = {g}"))
                    .collect()
            };
            let groups: serde_json::Map<String, Value> = result
                .homology
                .iter()
                .map(|(n, g)| (n.to_string(), group_json(g)))
                .collect();
            Ok(Report::new(
                true,
                lines,
                json!({"command": "hypertor", "homology": groups}),
            ))
        }
    }
}

fn lift_report(
    command: &str,
    lift: &Lift,
    output: Option<&Path>,
    witness: Option<&Path>,
) -> anyhow::Result<Report> {
    let map_ok = check_mc_map(&lift.map);
    let witness_ok = check_mc_homotopy(&lift.homotopy);
    let mut lines = vec![
        format!("lift is a multicomplex map: {}", verdict(map_ok)),
        format!("witness F∘g − ḡ = ds + sd: {}", verdict(witness_ok)),
    ];
    if !(map_ok && witness_ok) {
        return Err(Error::Internal("lift failed verification".into()).into());
    }
    let (out, text) = emit(&Document::McMap(lift.map.clone()), output, &mut lines)?;
    let witness_out = match witness {
        Some(path) => Some(
            emit(
                &Document::Homotopy(lift.homotopy.clone()),
                Some(path),
                &mut lines,
            )?
            .0,
        ),
        None => None,
    };
    Ok(Report::new(
        true,
        lines,
        json!({"command": command, "map_ok": map_ok, "witness_ok": witness_ok, "output": out, "witness": witness_out}),
    )
    .with_document(text))
}

fn group_json(g: &FgAbGroup) -> Value {
    json!({
        "invariant_factors": g.invariant_factors().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "free_rank": g.free_rank(),
        "display": g.to_string(),
    })
}

fn check(doc: Document, homological: bool) -> anyhow::Result<Report> {
    let kind = doc.kind();
    let (holds, mut lines, detail) = match &doc {
        Document::Complex(c) => {
            let bad: Vec<i64> = validate_complex(c).iter().map(|v| v.degree).collect();
            (
                bad.is_empty(),
                vec![format!("d∘d = 0: {}", verdict(bad.is_empty()))],
                json!({"violations": bad}),
            )
        }
        Document::Multicomplex(c) => {
            let bad: Vec<Value> = validate_multicomplex(c)
                .iter()
                .map(|v| json!({"n": v.n, "column": v.column, "row": v.row}))
                .collect();
            let mut lines = vec![format!(
                "multicomplex identity: {}",
                verdict(bad.is_empty())
            )];
            let mut holds = bad.is_empty();
            let mut detail = json!({"violations": bad});
            if homological {
                let h = is_homological(c);
                let failures: Vec<Vec<i64>> = row_exactness_failures(c)
                    .into_iter()
                    .map(|(i, j)| vec![i, j])
                    .collect();
                lines.push(format!(
                    "homological (d0 = 0, no positive columns, rows exact): {}",
                    verdict(h)
                ));
                holds &= h;
                detail["homological"] = Value::from(h);
                detail["row_exactness_failures"] = json!(failures);
            }
            (holds, lines, detail)
        }
        Document::Group(_) => (true, vec!["presentation: ok".into()], json!({})),
        Document::ChainMap(f) => {
            let ok = f.is_chain_map();
            (ok, vec![format!("chain map: {}", verdict(ok))], json!({}))
        }
        Document::McMap(f) => {
            let ok = check_mc_map(f);
            (
                ok,
                vec![format!("multicomplex map: {}", verdict(ok))],
                json!({}),
            )
        }
        Document::Homotopy(s) => {
            let ok = check_mc_homotopy(s);
            (
                ok,
                vec![format!(
                    "homotopy witness from − to = ds + sd: {}",
                    verdict(ok)
                )],
                json!({}),
            )
        }
        Document::Resolution(r) => {
            let report = verify_resolution(r);
            let lines = vec![
                format!(
                    "multicomplex identity: {}",
                    verdict(report.violations.is_empty())
                ),
                format!(
                    "homological (d0 = 0, rows exact): {}",
                    verdict(report.homological)
                ),
                format!(
                    "row augmentations onto H^j(A): {}",
                    verdict(report.row_failures.is_empty())
                ),
                format!("phi is a multicomplex map: {}", verdict(report.phi_is_map)),
                format!(
                    "Tot(phi) is a quasi-isomorphism: {}",
                    verdict(report.quasi_iso)
                ),
            ];
            let detail = json!({
                "violations": report.violations.len(),
                "homological": report.homological,
                "row_failures": report.row_failures,
                "phi_map": report.phi_is_map,
                "quasi_iso": report.quasi_iso,
            });
            (report.passed(), lines, detail)
        }
    };
    lines.insert(
        0,
        format!("{kind}: {}", if holds { "valid" } else { "invalid" }),
    );
    let mut json = json!({"command": "check", "kind": kind, "valid": holds});
    if let (Value::Object(obj), Value::Object(extra)) = (&mut json, detail) {
        obj.extend(extra);
    }
    Ok(Report::new(holds, lines, json))
}

fn homology(doc: Document, degree: Option<i64>) -> anyhow::Result<Report> {
    let a: ChainComplex = match doc {
        Document::Complex(c) => c,
        Document::Multicomplex(c) => total_complex(&c),
        other => {
            return Err(anyhow!(
                "homology expects a complex or multicomplex, found {}",
                other.kind()
            ))
        }
    };
    if !validate_complex(&a).is_empty() {
        return Err(Error::InvalidInput("d∘d ≠ 0; homology is undefined".into()).into());
    }
    let degrees: Vec<i64> = match degree {
        Some(n) => vec![n],
        None => a.degrees().collect(),
    };
    let groups: BTreeMap<i64, FgAbGroup> = degrees
        .iter()
        .map(|&n| (n, homology_at(&a, n).group))
        .collect();
    let lines = match degree {
        Some(n) => vec![groups[&n].to_string()],
        None => groups.iter().map(|(n, g)| format!("H^{n} = {g}")).collect(),
    };
    let json_groups: serde_json::Map<String, Value> = groups
        .iter()
        .map(|(n, g)| (n.to_string(), group_json(g)))
        .collect();
    Ok(Report::new(
        true,
        lines,
        json!({"command": "homology", "homology": json_groups}),
    ))
}

fn qiso(doc: Document) -> anyhow::Result<Report> {
    let f: ChainMap = match doc {
        Document::ChainMap(f) => f,
        Document::McMap(f) => {
            if !check_mc_map(&f) {
                return Err(Error::InvalidInput("not a multicomplex map".into()).into());
            }
            total_map(&f)
        }
        Document::Resolution(r) => {
            if !check_mc_map(r.phi()) {
                return Err(Error::InvalidInput("phi is not a multicomplex map".into()).into());
            }
            total_map(r.phi())
        }
        other => {
            return Err(anyhow!(
                "qiso expects a chain_map, mc_map or resolution, found {}",
                other.kind()
            ))
        }
    };
    if !validate_complex(f.source()).is_empty() || !validate_complex(f.target()).is_empty() {
        return Err(Error::InvalidInput("source or target has d∘d ≠ 0".into()).into());
    }
    if !f.is_chain_map() {
        return Err(Error::InvalidInput("not a chain map".into()).into());
    }
    let mut lines = Vec::new();
    let mut failing = Vec::new();
    for n in f.joint_degrees() {
        let m = induced_map_on_homology(&f, n)?;
        let iso = m.is_iso()?;
        lines.push(format!(
            "H^{n}: {} -> {}: {}",
            m.source(),
            m.target(),
            if iso { "iso" } else { "not iso" }
        ));
        if !iso {
            failing.push(n);
        }
    }
    let holds = failing.is_empty();
    lines.push(format!(
        "quasi-isomorphism: {}",
        if holds { "yes" } else { "no" }
    ));
    Ok(Report::new(
        holds,
        lines,
        json!({"command": "qiso", "quasi_iso": holds, "failing_degrees": failing}),
    ))
}
