//! Artifact records. JSON numbers round-trip exactly, so a verify run sees the
//! same floating-point state the solver accepted.

use std::io::Write;
use std::path::Path;

use graphpass_core::energy::{cerami_identity, phi};
use graphpass_core::model::AuditReport;
use graphpass_core::solver::{Provenance, SolutionRecord};
use graphpass_core::{Model, StatePair, WeightedGraph};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::manifest::SCHEMA;

/// One line of `solutions.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionLine {
    pub schema: String,
    pub id: usize,
    /// Energy level `k`, from 1.
    pub level: usize,
    pub vertices: Vec<String>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub energy: f64,
    pub residual_sup: f64,
    pub method: String,
    pub deflated_against: Vec<usize>,
    pub iterations: usize,
    pub e_norm: f64,
    pub is_trivial: bool,
}

impl SolutionLine {
    pub fn new(g: &WeightedGraph, level: usize, rec: &SolutionRecord) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            id: rec.id,
            level,
            vertices: g.labels().to_vec(),
            u: rec.state.u.values().to_vec(),
            v: rec.state.v.values().to_vec(),
            energy: rec.energy,
            residual_sup: rec.residual_sup,
            method: rec.method.key().to_string(),
            deflated_against: rec.deflated_against.clone(),
            iterations: rec.iterations,
            e_norm: rec.e_norm,
            is_trivial: rec.is_trivial,
        }
    }

    /// The state on `g`; vertices may come in any order, unlisted ones are 0.
    pub fn state(&self, g: &WeightedGraph) -> CliResult<StatePair> {
        let n = self.vertices.len();
        if self.u.len() != n || self.v.len() != n {
            return Err(CliError::Core(graphpass_core::Error::LengthMismatch {
                expected: n,
                got: self.u.len().min(self.v.len()),
            }));
        }
        let (mut u, mut v) = (vec![0.0; g.len()], vec![0.0; g.len()]);
        for (k, id) in self.vertices.iter().enumerate() {
            let i = g.index_of(id)?;
            u[i] = self.u[k];
            v[i] = self.v[k];
        }
        Ok(StatePair::from_vecs(g, u, v)?)
    }
}

pub fn read_solutions(path: &Path) -> CliResult<Vec<SolutionLine>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: SolutionLine =
            serde_json::from_str(line).map_err(|e| CliError::malformed(path, i + 1, e.to_string()))?;
        if rec.schema != SCHEMA {
            return Err(CliError::malformed(path, i + 1, format!("schema {:?}, expected {SCHEMA:?}", rec.schema)));
        }
        if Provenance::from_key(&rec.method).is_none() {
            return Err(CliError::malformed(path, i + 1, format!("unknown method {:?}", rec.method)));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> CliResult<()> {
    let mut buf = Vec::new();
    for r in rows {
        serde_json::to_writer(&mut buf, r).map_err(|e| CliError::io(path, e))?;
        buf.push(b'\n');
    }
    std::fs::write(path, buf).map_err(|e| CliError::io(path, e))
}

pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// `k,phi_k` table.
pub fn write_energy_csv(path: &Path, table: &[(usize, f64)]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    w.write_record(["k", "phi_k"]).map_err(|e| CliError::io(path, e))?;
    for (k, e) in table {
        w.serialize((k, e)).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Energy breakdown, Cerami identity and evenness gap of one state.
pub fn diagnostics(g: &WeightedGraph, model: &Model, id: usize, level: usize, state: &StatePair) -> CliResult<Value> {
    let e = phi(g, model, state)?;
    let c = cerami_identity(g, model, state)?;
    let flipped = phi(g, model, &state.negated())?.total;
    Ok(json!({
        "schema": SCHEMA,
        "id": id,
        "level": level,
        "quad_u": e.quad_u,
        "quad_v": e.quad_v,
        "kirchhoff_u": e.kirchhoff_u,
        "kirchhoff_v": e.kirchhoff_v,
        "potential_term": e.potential_term,
        "total": e.total,
        "theta": c.theta,
        "self_pairing": c.self_pairing,
        "calf_integral": c.calf_integral,
        "quarter_norms": c.quarter_norms,
        "kirchhoff_correction": c.kirchhoff_correction,
        "cerami_gap": c.gap,
        "evenness_gap": (flipped - e.total).abs(),
    }))
}

fn number_or_string(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

pub fn audit_json(report: &AuditReport, g: &WeightedGraph) -> Value {
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            json!({
                "hypothesis": c.hypothesis.key(),
                "verdict": c.verdict.key(),
                "witness": c.witness.map(|w| json!({
                    "vertex": g.label(w.vertex),
                    "s": w.s,
                    "t": w.t,
                    "reference": w.reference.map(|(s, t)| json!([s, t])),
                })),
                "note": c.note,
            })
        })
        .collect();
    let k = &report.constants;
    let gamma: Vec<Value> =
        k.gamma.iter().map(|(r, g)| json!({"r": number_or_string(*r), "gamma": [g[0], g[1]]})).collect();
    json!({
        "schema": SCHEMA,
        "any_failure": report.any_failure(),
        "checks": checks,
        "constants": {
            "theta": k.theta,
            "gamma": gamma,
            "stated_ar_gamma2": k.stated_ar_gamma2,
            "sharp_embedding_2": k.sharp_embedding_2,
            "rho_star": k.rho_star,
            "alpha_star": k.alpha_star,
            "outer_shell_min_potential": k.outer_shell_min_potential,
        },
    })
}

pub fn audit_text(report: &AuditReport, g: &WeightedGraph) -> String {
    let mut s = String::new();
    let width = report.checks.iter().map(|c| c.hypothesis.key().len()).max().unwrap_or(0);
    for c in &report.checks {
        let witness =
            c.witness.map(|w| format!("  at {} (s={:.6e}, t={:.6e})", g.label(w.vertex), w.s, w.t)).unwrap_or_default();
        let row = format!("{:<width$}  {:<30}{}", c.hypothesis.key(), c.verdict.key(), witness);
        s.push_str(row.trim_end());
        s.push('\n');
        if !c.note.is_empty() {
            s.push_str(&format!("{:<width$}  {}\n", "", c.note));
        }
    }
    let k = &report.constants;
    s.push_str(&format!("\ntheta             {}\n", k.theta));
    for (r, gm) in &k.gamma {
        s.push_str(&format!("gamma_{:<11} {:.6e} {:.6e}\n", format!("{r}"), gm[0], gm[1]));
    }
    s.push_str(&format!("sharp_embedding_2 {:.6e} {:.6e}\n", k.sharp_embedding_2[0], k.sharp_embedding_2[1]));
    if let Some(r) = k.rho_star {
        s.push_str(&format!("rho_star          {r:.6e}\n"));
    }
    if let Some(a) = k.alpha_star {
        s.push_str(&format!("alpha_star        {a:.6e}\n"));
    }
    s
}

/// Aligned `k  phi_k  residual_sup  method  id` table.
pub fn level_table(rows: &[SolutionLine]) -> String {
    let mut s = format!("{:>3}  {:>22}  {:>12}  {:<16}  {:>4}\n", "k", "phi_k", "residual_sup", "method", "id");
    for r in rows {
        s.push_str(&format!(
            "{:>3}  {:>22.15e}  {:>12.3e}  {:<16}  {:>4}\n",
            r.level, r.energy, r.residual_sup, r.method, r.id
        ));
    }
    s
}

pub fn flush_stdout(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}
