//! Plain-text input formats.
//!
//! Graph file:
//!
//! ```text
//! graph 3
//! v x1 1.0
//! v x2 1.0
//! v x3
//! e x1 x2 1.0
//! e x2 x3
//! ```
//!
//! Missing measures and weights default to 1. Vertex function files hold
//! `<id> <value>` lines; unlisted vertices are 0. Model files are key-value
//! lines, documented on [`parse_model`]. `#` starts a comment everywhere.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use graphpass_core::model::{EvenExponential, PowerLaw, SamplingPlan, SexticPolynomial};
use graphpass_core::{Model, Nonlinearity, VertexFunction, WeightedGraph};

use crate::error::{CliError, CliResult};

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Non-empty lines with comments stripped, numbered from 1.
fn tokens(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("");
        let toks: Vec<&str> = line.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn number(path: &Path, line: usize, tok: &str) -> CliResult<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::malformed(path, line, format!("expected a finite number, got {tok:?}")))
}

pub fn parse_graph(path: &Path) -> CliResult<WeightedGraph> {
    parse_graph_str(&read(path)?, path)
}

pub fn parse_graph_str(text: &str, path: &Path) -> CliResult<WeightedGraph> {
    let mut declared = None;
    let mut ids: Vec<String> = Vec::new();
    let mut mu = Vec::new();
    let mut edges: Vec<(String, String, f64)> = Vec::new();
    for (line, t) in tokens(text) {
        match t[0] {
            "graph" => {
                if declared.is_some() {
                    return Err(CliError::malformed(path, line, "duplicate graph header"));
                }
                if t.len() != 2 {
                    return Err(CliError::malformed(path, line, "expected `graph <n_vertices>`"));
                }
                let n = t[1]
                    .parse::<usize>()
                    .map_err(|_| CliError::malformed(path, line, format!("bad vertex count {:?}", t[1])))?;
                declared = Some(n);
            }
            "v" if declared.is_some() => {
                if !(2..=3).contains(&t.len()) {
                    return Err(CliError::malformed(path, line, "expected `v <id> [mu]`"));
                }
                ids.push(t[1].to_string());
                mu.push(if t.len() == 3 { number(path, line, t[2])? } else { 1.0 });
            }
            "e" if declared.is_some() => {
                if !(3..=4).contains(&t.len()) {
                    return Err(CliError::malformed(path, line, "expected `e <id> <id> [w]`"));
                }
                let w = if t.len() == 4 { number(path, line, t[3])? } else { 1.0 };
                edges.push((t[1].to_string(), t[2].to_string(), w));
            }
            "v" | "e" => return Err(CliError::malformed(path, line, "record before the graph header")),
            other => return Err(CliError::malformed(path, line, format!("unknown record {other:?}"))),
        }
    }
    let n = declared.ok_or_else(|| CliError::malformed(path, 1, "missing graph header"))?;
    if n != ids.len() {
        return Err(CliError::malformed(path, 1, format!("header declares {n} vertices, file lists {}", ids.len())));
    }
    Ok(WeightedGraph::build(&ids, &edges, &mu)?)
}

pub fn parse_vertex_function(g: &WeightedGraph, path: &Path) -> CliResult<VertexFunction> {
    let text = read(path)?;
    let mut values = vec![0.0; g.len()];
    let mut seen = vec![false; g.len()];
    for (line, t) in tokens(&text) {
        if t.len() != 2 {
            return Err(CliError::malformed(path, line, "expected `<vertex_id> <value>`"));
        }
        let i = g.index_of(t[0]).map_err(|_| CliError::malformed(path, line, format!("unknown vertex {:?}", t[0])))?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(CliError::malformed(path, line, format!("vertex {:?} listed twice", t[0])));
        }
        values[i] = number(path, line, t[1])?;
    }
    Ok(VertexFunction::new(g, values)?)
}

/// A parsed model file.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub model: Model,
    pub plan: SamplingPlan,
    /// `name param=value ...` as written, for reports.
    pub nonlinearity: String,
}

enum Source {
    Const(f64),
    File(PathBuf),
}

fn source(base: &Path, path: &Path, line: usize, toks: &[&str]) -> CliResult<Source> {
    match toks {
        ["const", c] => Ok(Source::Const(number(path, line, c)?)),
        [file] => Ok(Source::File(base.join(file))),
        _ => Err(CliError::malformed(path, line, "expected `const <c>` or a function file")),
    }
}

fn resolve(g: &WeightedGraph, src: &Source) -> CliResult<Vec<f64>> {
    match src {
        Source::Const(c) => Ok(vec![*c; g.len()]),
        Source::File(p) => {
            if !p.exists() {
                return Err(CliError::MissingInput(format!("function file {}", p.display())));
            }
            Ok(parse_vertex_function(g, p)?.into_values())
        }
    }
}

/// Parses a model file for graph `g`.
///
/// ```text
/// a1 1.0
/// a2 1.0
/// b1 0
/// b2 0
/// potential V1 const 1
/// potential V2 v2.txt
/// nonlinearity remark11_poly a1=0.5 a2=coeff.txt
/// theta 4
/// scalar true
/// rho_star 0.05
/// audit seed 7
/// audit samples 1000
/// audit range 3
/// audit strict false
/// ```
///
/// Builtins: `remark11_poly a1= a2=`, `remark42_exponential a=`, `power_pq p= q= scale=`.
/// Coefficient values are numbers or function files. Relative paths resolve
/// against the model file's directory. Every key may appear at most once and
/// only `nonlinearity` is required; `a` defaults to 1, `b` to 0, `V` to 1.
pub fn parse_model(g: &WeightedGraph, path: &Path) -> CliResult<ModelFile> {
    let text = read(path)?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut coeff = BTreeMap::from([("a1", 1.0), ("a2", 1.0), ("b1", 0.0), ("b2", 0.0)]);
    let mut potentials = [Source::Const(1.0), Source::Const(1.0)];
    let mut nonlinearity: Option<(usize, Vec<String>)> = None;
    let (mut theta, mut scalar, mut rho_star) = (None, false, None);
    let mut plan = SamplingPlan::default();

    for (line, t) in tokens(&text) {
        let key = match t[0] {
            "potential" | "audit" if t.len() >= 2 => format!("{} {}", t[0], t[1]),
            k => k.to_string(),
        };
        if let Some(first) = seen.insert(key.clone(), line) {
            return Err(CliError::malformed(path, line, format!("duplicate key {key:?} (first on line {first})")));
        }
        let single = |t: &[&str]| -> CliResult<f64> {
            match t {
                [_, x] => number(path, line, x),
                _ => Err(CliError::malformed(path, line, format!("expected `{} <value>`", t[0]))),
            }
        };
        match t[0] {
            "a1" | "a2" | "b1" | "b2" => {
                let name = coeff.keys().copied().find(|k| *k == t[0]).unwrap_or_default();
                coeff.insert(name, single(&t)?);
            }
            "potential" => {
                let slot = match t.get(1) {
                    Some(&"V1") => 0,
                    Some(&"V2") => 1,
                    _ => return Err(CliError::malformed(path, line, "expected `potential V1|V2 ...`")),
                };
                potentials[slot] = source(&base, path, line, &t[2..])?;
            }
            "nonlinearity" => {
                if t.len() < 2 {
                    return Err(CliError::malformed(path, line, "expected `nonlinearity <name> [param=value ...]`"));
                }
                nonlinearity = Some((line, t[1..].iter().map(|s| s.to_string()).collect()));
            }
            "theta" => theta = Some(single(&t)?),
            "rho_star" => rho_star = Some(single(&t)?),
            "scalar" => {
                scalar = match t.get(1..) {
                    Some(["true"]) => true,
                    Some(["false"]) => false,
                    _ => return Err(CliError::malformed(path, line, "expected `scalar true|false`")),
                }
            }
            "audit" => {
                let bad = || CliError::malformed(path, line, "expected `audit seed|samples|range|strict <value>`");
                match t.get(1..) {
                    Some(["seed", x]) => plan.seed = x.parse().map_err(|_| bad())?,
                    Some(["samples", x]) => plan.samples = x.parse().map_err(|_| bad())?,
                    Some(["range", x]) => plan.range = number(path, line, x)?,
                    Some(["strict", x]) => plan.strict = x.parse().map_err(|_| bad())?,
                    _ => return Err(bad()),
                }
            }
            other => return Err(CliError::malformed(path, line, format!("unknown key {other:?}"))),
        }
    }

    let (nl_line, spec) = nonlinearity.ok_or_else(|| CliError::malformed(path, 1, "missing `nonlinearity`"))?;
    let f = build_nonlinearity(g, &base, path, nl_line, &spec, rho_star)?;
    let v1 = VertexFunction::new(g, resolve(g, &potentials[0])?)?;
    let v2 = VertexFunction::new(g, resolve(g, &potentials[1])?)?;
    let mut model = Model::new(g, [coeff["a1"], coeff["a2"]], [coeff["b1"], coeff["b2"]], [v1, v2], f)?;
    if let Some(th) = theta {
        model = model.with_theta(th)?;
    }
    if scalar {
        model = model.with_scalar_reduction()?;
    }
    Ok(ModelFile { model, plan, nonlinearity: spec.join(" ") })
}

fn build_nonlinearity(
    g: &WeightedGraph,
    base: &Path,
    path: &Path,
    line: usize,
    spec: &[String],
    rho_star: Option<f64>,
) -> CliResult<Arc<dyn Nonlinearity>> {
    let mut params: BTreeMap<&str, &str> = BTreeMap::new();
    for p in &spec[1..] {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| CliError::malformed(path, line, format!("expected param=value, got {p:?}")))?;
        if params.insert(k, v).is_some() {
            return Err(CliError::malformed(path, line, format!("duplicate parameter {k:?}")));
        }
    }
    let allowed: &[&str] = match spec[0].as_str() {
        "remark11_poly" => &["a1", "a2"],
        "remark42_exponential" => &["a"],
        "power_pq" => &["p", "q", "scale"],
        other => return Err(CliError::malformed(path, line, format!("unknown nonlinearity {other:?}"))),
    };
    if let Some(k) = params.keys().find(|k| !allowed.contains(k)) {
        return Err(CliError::malformed(path, line, format!("unknown parameter {k:?} for {}", spec[0])));
    }
    let get = |k: &str| -> CliResult<&str> {
        params.get(k).copied().ok_or_else(|| CliError::malformed(path, line, format!("missing parameter {k:?}")))
    };
    let coeff = |k: &str| -> CliResult<Vec<f64>> {
        let raw = get(k)?;
        match raw.parse::<f64>() {
            Ok(c) => Ok(vec![c; g.len()]),
            Err(_) => resolve(g, &Source::File(base.join(raw))),
        }
    };
    let num = |k: &str| -> CliResult<f64> { number(path, line, get(k)?) };
    Ok(match spec[0].as_str() {
        "remark11_poly" => {
            let mut f = SexticPolynomial::new(coeff("a1")?, coeff("a2")?)?;
            if rho_star.is_some() {
                f.metadata_mut().rho_star = rho_star;
            }
            Arc::new(f)
        }
        "remark42_exponential" => {
            let mut f = EvenExponential::new(coeff("a")?)?;
            if rho_star.is_some() {
                f.metadata_mut().rho_star = rho_star;
            }
            Arc::new(f)
        }
        _ => {
            let mut f = PowerLaw::symmetric(num("p")?, num("q")?, num("scale")?)?;
            if rho_star.is_some() {
                f.metadata_mut().rho_star = rho_star;
            }
            Arc::new(f)
        }
    })
}
