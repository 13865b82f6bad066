use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use graphpass_core::energy::{phi, residual};
use graphpass_core::model::audit;
use graphpass_core::solver::{antipode, enumerate, mountain_pass, newton_solve, Method, Outcome, SolutionRecord};
use graphpass_core::{SolverConfig, StatePair, WeightedGraph};
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::export::{self, SolutionLine};
use crate::files::{parse_graph, parse_model, ModelFile};
use crate::manifest::{Command, RunManifest, SolveMethod, SCHEMA};

pub fn run(m: &RunManifest) -> CliResult<()> {
    let started = Instant::now();
    let result = match m.command {
        Command::Validate => validate(m),
        Command::Audit => run_audit(m),
        Command::Solve => solve(m),
        Command::Verify => verify(m),
        Command::Report => report(m),
    };
    if matches!(m.command, Command::Solve | Command::Audit | Command::Validate) && m.out.is_dir() {
        write_meta(m, started, &result)?;
    }
    result
}

fn out_dir(m: &RunManifest) -> CliResult<&Path> {
    std::fs::create_dir_all(&m.out).map_err(|e| CliError::io(&m.out, e))?;
    Ok(&m.out)
}

fn load(m: &RunManifest) -> CliResult<(WeightedGraph, ModelFile)> {
    let g = parse_graph(required(&m.graph)?)?;
    let model = parse_model(&g, required(&m.model)?)?;
    Ok((g, model))
}

fn required(p: &Option<PathBuf>) -> CliResult<&Path> {
    p.as_deref().ok_or_else(|| CliError::MissingInput("path".into()))
}

/// Timestamps and timings live here so the other artifacts stay byte-stable.
fn write_meta(m: &RunManifest, started: Instant, result: &CliResult<()>) -> CliResult<()> {
    let unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = json!({
        "schema": SCHEMA,
        "command": format!("{:?}", m.command).to_lowercase(),
        "graph": m.graph.as_ref().map(|p| p.display().to_string()),
        "model": m.model.as_ref().map(|p| p.display().to_string()),
        "K": m.k,
        "seed": m.seed,
        "tol": m.tol,
        "method": m.method.key(),
        "finished_unix": unix,
        "elapsed_seconds": started.elapsed().as_secs_f64(),
        "exit_reason": result.as_ref().err().map(|e| e.reason()),
        "version": env!("CARGO_PKG_VERSION"),
    });
    export::write_json(&m.out.join("run_meta.json"), &meta)
}

fn validate(m: &RunManifest) -> CliResult<()> {
    let g = parse_graph(required(&m.graph)?)?;
    if let Some(model) = &m.model {
        parse_model(&g, model)?;
    }
    let degrees: Vec<usize> = (0..g.len()).map(|i| g.degree(i)).collect();
    let report = json!({
        "schema": SCHEMA,
        "vertices": g.len(),
        "edges": g.edges().len(),
        "connected": true,
        "mu_min": g.mu_min(),
        "total_measure": g.measure().iter().sum::<f64>(),
        "min_degree": degrees.iter().min(),
        "max_degree": degrees.iter().max(),
        "model_checked": m.model.is_some(),
    });
    let text = format!(
        "vertices      {}\nedges         {}\nconnected     yes\nmu_min        {}\ndegree range  {}..{}\n",
        g.len(),
        g.edges().len(),
        g.mu_min(),
        degrees.iter().min().unwrap_or(&0),
        degrees.iter().max().unwrap_or(&0)
    );
    let dir = out_dir(m)?;
    export::write_json(&dir.join("validate.json"), &report)?;
    export::flush_stdout(&text);
    Ok(())
}

fn run_audit(m: &RunManifest) -> CliResult<()> {
    let (g, mf) = load(m)?;
    let report = audit(&g, &mf.model, &mf.plan)?;
    let dir = out_dir(m)?;
    let text = export::audit_text(&report, &g);
    export::write_json(&dir.join("audit.json"), &export::audit_json(&report, &g))?;
    export::write_text(&dir.join("audit.txt"), &text)?;
    export::flush_stdout(&text);
    let failed: Vec<String> =
        report.checks.iter().filter(|c| c.verdict.is_failure()).map(|c| c.hypothesis.key().to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::AuditFailure(failed))
    }
}

fn solve(m: &RunManifest) -> CliResult<()> {
    let (g, mf) = load(m)?;
    let model = &mf.model;
    let mut config = SolverConfig { tol_residual: m.tol, seed: m.seed, ..SolverConfig::default() };
    config.mountain_pass_first = m.method == SolveMethod::Both;
    config.method = if m.method == SolveMethod::Mp { Method::MountainPass } else { Method::NewtonDeflated };
    config.validate()?;

    let mut levels: Vec<(usize, Vec<SolutionRecord>)> = Vec::new();
    let mut shortfall = None;
    if m.method == SolveMethod::Mp {
        let far = StatePair::from_vecs(&g, vec![1.0; g.len()], vec![1.0; g.len()])?;
        match mountain_pass(&g, model, &config, &far) {
            Ok(mut rec) => {
                rec.id = 1;
                let mut pair = vec![rec.clone()];
                if let Ok(mut anti) = antipode(&g, model, &rec, m.tol) {
                    anti.id = 2;
                    pair.push(anti);
                }
                levels.push((1, pair));
                if m.k > 1 {
                    shortfall = Some((1, m.k));
                }
            }
            Err(e) => {
                eprintln!("mountain pass: {e}");
                shortfall = Some((0, m.k));
            }
        }
    } else {
        let e = enumerate(&g, model, &config, m.k)?;
        for (k, level) in e.levels.iter().enumerate() {
            let mut recs = vec![level.representative.clone()];
            recs.extend(level.antipode.clone());
            levels.push((k + 1, recs));
        }
        if let Outcome::FoundFewer { found, requested } = e.outcome {
            shortfall = Some((found, requested));
        }
    }

    let mut lines = Vec::new();
    let mut diags = Vec::new();
    for (k, recs) in &levels {
        for rec in recs {
            lines.push(SolutionLine::new(&g, *k, rec));
            diags.push(export::diagnostics(&g, model, rec.id, *k, &rec.state)?);
        }
    }
    let table: Vec<(usize, f64)> = levels.iter().map(|(k, r)| (*k, r[0].energy)).collect();
    let dir = out_dir(m)?;
    export::write_jsonl(&dir.join("solutions.jsonl"), &lines)?;
    export::write_jsonl(&dir.join("diagnostics.jsonl"), &diags)?;
    export::write_energy_csv(&dir.join("energies.csv"), &table)?;
    let summary = export::level_table(&lines);
    export::write_text(&dir.join("summary.txt"), &summary)?;
    export::flush_stdout(&summary);
    match shortfall {
        Some((found, requested)) => Err(CliError::FoundFewer { found, requested }),
        None => Ok(()),
    }
}

/// Verdict for one imported record.
struct Check {
    residual_sup: f64,
    worst_vertex: usize,
    energy_drift: f64,
    /// Vertex and size of the largest move back to a nearby root.
    correction: Option<(usize, f64)>,
}

fn check_record(
    g: &WeightedGraph,
    mf: &ModelFile,
    state: &StatePair,
    recorded: f64,
    tol: f64,
    locate: bool,
) -> CliResult<Check> {
    let model = &mf.model;
    let r = residual(g, model, state)?;
    let n = g.len();
    let score = |i: usize| r.u.values()[i].abs().max(r.v.values()[i].abs());
    let worst_vertex = (0..n).max_by(|&a, &b| score(a).total_cmp(&score(b))).unwrap_or(0);
    let energy = phi(g, model, state)?.total;
    let correction = if locate { newton_correction(g, mf, state, tol)? } else { None };
    Ok(Check { residual_sup: score(worst_vertex), worst_vertex, energy_drift: (energy - recorded).abs(), correction })
}

/// Runs Newton from the imported state and returns the vertex where the
/// state moved most. A root corrupted at one vertex moves back exactly there.
fn newton_correction(
    g: &WeightedGraph,
    mf: &ModelFile,
    state: &StatePair,
    tol: f64,
) -> CliResult<Option<(usize, f64)>> {
    let config = SolverConfig { tol_residual: tol, ..SolverConfig::default() };
    let Ok(root) = newton_solve(g, &mf.model, &config, state, &[]) else { return Ok(None) };
    let d = state.axpy(-1.0, &root.state);
    let size = |i: usize| d.u.values()[i].abs().max(d.v.values()[i].abs());
    Ok((0..g.len()).max_by(|&a, &b| size(a).total_cmp(&size(b))).map(|i| (i, size(i))))
}

fn verify(m: &RunManifest) -> CliResult<()> {
    let (g, mf) = load(m)?;
    let path = required(&m.solutions)?;
    let records = export::read_solutions(path)?;
    if records.is_empty() {
        return Err(CliError::MissingInput(format!("{} holds no solutions", path.display())));
    }
    let mut report = String::new();
    let mut failures = Vec::new();
    for rec in &records {
        let state = rec.state(&g)?;
        let quick = check_record(&g, &mf, &state, rec.energy, m.tol, false)?;
        let energy_ok = quick.energy_drift <= 1e-10 * (1.0 + rec.energy.abs());
        if quick.residual_sup <= m.tol && energy_ok {
            report.push_str(&format!(
                "ok    id {:>3}  level {:>2}  residual_sup {:.3e}\n",
                rec.id, rec.level, quick.residual_sup
            ));
            continue;
        }
        let c = check_record(&g, &mf, &state, rec.energy, m.tol, true)?;
        let vertex = g.label(c.correction.map(|(i, _)| i).unwrap_or(c.worst_vertex));
        let line = format!(
            "FAIL  id {:>3}  level {:>2}  residual_sup {:.3e} (tol {:.1e})  energy drift {:.3e}  offending vertex {}  worst residual at {}\n",
            rec.id,
            rec.level,
            c.residual_sup,
            m.tol,
            c.energy_drift,
            vertex,
            g.label(c.worst_vertex)
        );
        report.push_str(&line);
        failures.push(format!("id {} at vertex {vertex}", rec.id));
    }
    export::flush_stdout(&report);
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(failures.join("; ")))
    }
}

fn report(m: &RunManifest) -> CliResult<()> {
    let path = match &m.solutions {
        Some(p) => p.clone(),
        None => m.out.join("solutions.jsonl"),
    };
    if !path.exists() {
        return Err(CliError::MissingInput(format!("{} does not exist", path.display())));
    }
    let mut rows = export::read_solutions(&path)?;
    rows.sort_by(|a, b| a.level.cmp(&b.level).then(a.id.cmp(&b.id)));
    let text = export::level_table(&rows);
    let dir = out_dir(m)?;
    export::write_text(&dir.join("report.txt"), &text)?;
    export::flush_stdout(&text);
    Ok(())
}
