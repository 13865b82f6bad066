//! Sampled checks of the model hypotheses.
//!
//! Pointwise hypotheses are checked at sample points; limit hypotheses get
//! trend evidence only, and coercivity of the potentials cannot be decided
//! on a finite graph at all. Every failing verdict carries a witness that
//! [`witness_violates`] re-evaluates.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{cal_f_with, embedding_gamma, stated_ar_gamma2, GrowthBound, Model};
use crate::calculus::{integral_raw, sharp_embedding_2};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Hypothesis {
    /// Positive potentials, coercive at infinity.
    V,
    /// `F(x,0,0) = 0`.
    F0,
    /// Growth bound `|F|, |F_s|, |F_t| ≤ a(|(s,t)|) b(x)`.
    F1,
    /// `a(r)/r² → h < ∞` as `r → 0`.
    C1,
    /// Positivity of `α*` on the small ring.
    C2,
    /// `F / |(s,t)|^θ → ∞`.
    F2,
    /// `F ≥ 0` beyond `r0`.
    F3,
    /// `𝓕 ≥ 0` and `|F|^k ≤ c |(s,t)|^{2k} 𝓕` beyond `r0`.
    F4,
    /// `μF ≤ sF_s + tF_t + σ(s² + t²)`.
    F5,
    /// `F(x,s,t) = F(x,−s,−t)`.
    F6,
    /// Analytic partials agree with finite differences.
    Partials,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 11] = [
        Hypothesis::V,
        Hypothesis::F0,
        Hypothesis::F1,
        Hypothesis::C1,
        Hypothesis::C2,
        Hypothesis::F2,
        Hypothesis::F3,
        Hypothesis::F4,
        Hypothesis::F5,
        Hypothesis::F6,
        Hypothesis::Partials,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Hypothesis::V => "V",
            Hypothesis::F0 => "F0",
            Hypothesis::F1 => "F1",
            Hypothesis::C1 => "C1",
            Hypothesis::C2 => "C2",
            Hypothesis::F2 => "F2",
            Hypothesis::F3 => "F3",
            Hypothesis::F4 => "F4",
            Hypothesis::F5 => "F5",
            Hypothesis::F6 => "F6",
            Hypothesis::Partials => "partials",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    PassesOnSamples,
    FailsWithWitness,
    /// A declared constant lies outside its admissible range; no point witness exists.
    InvalidConstant,
    NotCheckableOnFiniteGraph,
}

impl Verdict {
    pub fn key(self) -> &'static str {
        match self {
            Verdict::PassesOnSamples => "passes_on_samples",
            Verdict::FailsWithWitness => "fails_with_witness",
            Verdict::InvalidConstant => "invalid_constant",
            Verdict::NotCheckableOnFiniteGraph => "not_checkable_on_finite_graph",
        }
    }

    pub fn is_failure(self) -> bool {
        matches!(self, Verdict::FailsWithWitness | Verdict::InvalidConstant)
    }
}

/// A sample point `(x, s, t)`. For trend checks `reference` is the earlier
/// point on the same ray that the witness failed to exceed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub vertex: usize,
    pub s: f64,
    pub t: f64,
    pub reference: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    pub seed: u64,
    /// Random `(x, s, t)` samples on top of a fixed set of small points.
    pub samples: usize,
    /// `|s|, |t| ≤ range` for random samples.
    pub range: f64,
    /// Radii for the superlinear-growth trend, increasing.
    pub ray_radii: Vec<f64>,
    pub rays: usize,
    /// Side of the grid used to maximize `a(·)` over the `ℓ¹` ball.
    pub grid: usize,
    /// Turn missing metadata into [`Error::MissingMetadata`].
    pub strict: bool,
    /// Vertex used as `x₀` for the outermost distance shell.
    pub center: usize,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 1000,
            range: 3.0,
            ray_radii: vec![10.0, 100.0, 1000.0],
            rays: 8,
            grid: 201,
            strict: false,
            center: 0,
        }
    }
}

/// Constants computed while auditing.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditConstants {
    pub theta: f64,
    /// `(r, [γ_{r,1}, γ_{r,2}])` for `r ∈ {2, 3, 4, 6, ∞}`.
    pub gamma: Vec<(f64, [f64; 2])>,
    /// The `r = 2` value as the Ambrosetti-Rabinowitz hypothesis states it.
    pub stated_ar_gamma2: [f64; 2],
    pub sharp_embedding_2: [f64; 2],
    pub rho_star: Option<f64>,
    pub alpha_star: Option<f64>,
    /// Minimum of `V_i` over the outermost distance shell around the center.
    pub outer_shell_min_potential: [f64; 2],
}

impl AuditConstants {
    pub fn gamma_inf(&self) -> [f64; 2] {
        self.gamma.last().map(|g| g.1).unwrap_or([f64::NAN; 2])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub checks: Vec<HypothesisCheck>,
    pub constants: AuditConstants,
}

impl AuditReport {
    pub fn check(&self, h: Hypothesis) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.hypothesis == h)
    }

    pub fn verdict(&self, h: Hypothesis) -> Option<Verdict> {
        self.check(h).map(|c| c.verdict)
    }

    pub fn any_failure(&self) -> bool {
        self.checks.iter().any(|c| c.verdict.is_failure())
    }
}

const EVEN_TOL: f64 = 1e-12;
const POINT_TOL: f64 = 1e-12;

fn growth_weight(bound: &GrowthBound, x: usize) -> f64 {
    if bound.weight.is_empty() {
        1.0
    } else {
        bound.weight[x]
    }
}

fn radius(s: f64, t: f64) -> f64 {
    (s * s + t * t).sqrt()
}

/// Whether `w` violates hypothesis `h` for `model` (trend hypotheses compare
/// against `w.reference`).
pub fn witness_violates(g: &WeightedGraph, model: &Model, h: Hypothesis, w: &Witness) -> bool {
    let f = model.nonlinearity();
    let meta = f.metadata();
    let theta = model.theta();
    let (x, s, t) = (w.vertex, w.s, w.t);
    if x >= g.len() {
        return false;
    }
    match h {
        Hypothesis::F0 => f.value(x, 0.0, 0.0) != 0.0,
        Hypothesis::F6 => {
            let (a, b) = (f.value(x, s, t), f.value(x, -s, -t));
            (a - b).abs() > EVEN_TOL * (1.0 + a.abs())
        }
        Hypothesis::F1 => match &meta.growth_bound {
            Some(bound) => {
                let cap = (bound.radial)(radius(s, t)) * growth_weight(bound, x) * (1.0 + POINT_TOL);
                let [fs, ft] = f.gradient(x, s, t);
                f.value(x, s, t).abs() > cap || fs.abs() > cap || ft.abs() > cap
            }
            None => false,
        },
        Hypothesis::F3 => f.value(x, s, t) < -POINT_TOL,
        Hypothesis::F4 => {
            let calf = cal_f_with(f, theta, x, s, t);
            let v = f.value(x, s, t);
            if calf < -POINT_TOL * (1.0 + v.abs()) {
                return true;
            }
            match (meta.k, meta.c) {
                (Some(k), Some(c)) => {
                    v.abs().powf(k) > c * radius(s, t).powf(2.0 * k) * calf * (1.0 + 1e-9) + POINT_TOL
                }
                _ => false,
            }
        }
        Hypothesis::F5 => match (meta.mu_ar, meta.sigma) {
            (Some(mu), Some(sigma)) => {
                let [fs, ft] = f.gradient(x, s, t);
                let lhs = mu * f.value(x, s, t);
                let rhs = s * fs + t * ft + sigma * (s * s + t * t);
                lhs > rhs + POINT_TOL * (1.0 + lhs.abs())
            }
            _ => false,
        },
        Hypothesis::F2 => match w.reference {
            Some((s0, t0)) => {
                let ratio = |s: f64, t: f64| f.value(x, s, t) / radius(s, t).powf(theta);
                !(ratio(s, t) > ratio(s0, t0))
            }
            None => false,
        },
        Hypothesis::Partials => {
            let [fs, ft] = f.gradient(x, s, t);
            let [ds, dt] = fd_gradient(f, x, s, t);
            (fs - ds).abs() > 1e-6 * (1.0 + fs.abs()) || (ft - dt).abs() > 1e-6 * (1.0 + ft.abs())
        }
        Hypothesis::C2 => match (&meta.growth_bound, w.reference) {
            // reference = (ρ*, ∫b dμ): violation when a(|(s,t)|) ∫b ≥ ρ*²/4.
            (Some(bound), Some((rho, mass))) => (bound.radial)(radius(s, t)) * mass >= 0.25 * rho * rho,
            _ => false,
        },
        Hypothesis::V | Hypothesis::C1 => false,
    }
}

fn fd_gradient(f: &dyn super::Nonlinearity, x: usize, s: f64, t: f64) -> [f64; 2] {
    let hs = 1e-5 * (1.0 + s.abs());
    let ht = 1e-5 * (1.0 + t.abs());
    [
        (f.value(x, s + hs, t) - f.value(x, s - hs, t)) / (2.0 * hs),
        (f.value(x, s, t + ht) - f.value(x, s, t - ht)) / (2.0 * ht),
    ]
}

struct Auditor<'a> {
    g: &'a WeightedGraph,
    model: &'a Model,
    plan: &'a SamplingPlan,
    points: Vec<(usize, f64, f64)>,
    checks: Vec<HypothesisCheck>,
}

impl Auditor<'_> {
    fn push(&mut self, hypothesis: Hypothesis, verdict: Verdict, witness: Option<Witness>, note: String) {
        self.checks.push(HypothesisCheck { hypothesis, verdict, witness, note });
    }

    fn missing(&mut self, hypothesis: Hypothesis, field: &str) -> Result<()> {
        if self.plan.strict {
            return Err(Error::MissingMetadata(format!("{} needs {field}", hypothesis.key())));
        }
        self.push(hypothesis, Verdict::NotCheckableOnFiniteGraph, None, format!("missing metadata: {field}"));
        Ok(())
    }

    /// First sample (optionally restricted) violating `h`.
    fn scan(&mut self, h: Hypothesis, keep: impl Fn(f64) -> bool, note: &str) {
        let found = self
            .points
            .iter()
            .filter(|p| keep(radius(p.1, p.2)))
            .map(|&(vertex, s, t)| Witness { vertex, s, t, reference: None })
            .find(|w| witness_violates(self.g, self.model, h, w));
        let checked = self.points.iter().filter(|p| keep(radius(p.1, p.2))).count();
        match found {
            Some(w) => self.push(h, Verdict::FailsWithWitness, Some(w), String::from(note)),
            None => self.push(h, Verdict::PassesOnSamples, None, format!("{note}; {checked} samples")),
        }
    }
}

fn sample_points(g: &WeightedGraph, plan: &SamplingPlan) -> Vec<(usize, f64, f64)> {
    let fixed = [
        (1.0, 0.0),
        (0.0, 1.0),
        (1.0, 1.0),
        (-1.0, 0.5),
        (0.5, -2.0),
        (0.1, 0.0),
        (0.0, -0.25),
        (2.0, 2.0),
        (-3.0, 1.0),
        (1e-3, -1e-3),
    ];
    let mut points = Vec::new();
    for x in 0..g.len().min(64) {
        for &(s, t) in &fixed {
            points.push((x, s, t));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    for _ in 0..plan.samples {
        let x = rng.random_range(0..g.len());
        let s = plan.range * (2.0 * rng.random::<f64>() - 1.0);
        let t = plan.range * (2.0 * rng.random::<f64>() - 1.0);
        points.push((x, s, t));
    }
    points
}

/// Maximum of `a` over `{|s| + |t| ≤ radius}` by grid search plus pattern-search refinement.
fn max_over_l1_ball(a: &dyn Fn(f64) -> f64, ball: f64, grid: usize) -> (f64, f64, f64) {
    let grid = grid.max(3);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let step = 2.0 * ball / (grid - 1) as f64;
    for i in 0..grid {
        let s = -ball + step * i as f64;
        for j in 0..grid {
            let t = -ball + step * j as f64;
            if s.abs() + t.abs() > ball * (1.0 + 1e-12) {
                continue;
            }
            let v = a(radius(s, t));
            if v > best.0 {
                best = (v, s, t);
            }
        }
    }
    let mut h = step;
    for _ in 0..60 {
        let mut improved = false;
        for (ds, dt) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
            let (s, t) = (best.1 + ds, best.2 + dt);
            if s.abs() + t.abs() > ball {
                continue;
            }
            let v = a(radius(s, t));
            if v > best.0 {
                best = (v, s, t);
                improved = true;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    best
}

/// Runs every check and computes the constants.
pub fn audit(g: &WeightedGraph, model: &Model, plan: &SamplingPlan) -> Result<AuditReport> {
    model.check(g)?;
    if plan.center >= g.len() {
        return Err(Error::BadParams(format!("audit center {} out of range", plan.center)));
    }
    let f = model.nonlinearity();
    let meta = f.metadata().clone();
    let theta = model.theta();
    let inf_v = model.inf_potential();
    let mu_min = g.mu_min();

    let mut gamma = Vec::new();
    for r in [2.0, 3.0, 4.0, 6.0, f64::INFINITY] {
        gamma.push((r, [embedding_gamma(mu_min, inf_v[0], r)?, embedding_gamma(mu_min, inf_v[1], r)?]));
    }
    let gamma_inf = gamma[4].1;
    let gamma2 = gamma[0].1;
    let sharp = [
        sharp_embedding_2(g, model.a()[0], model.potential(0))?,
        sharp_embedding_2(g, model.a()[1], model.potential(1))?,
    ];

    let dist = g.distances_from(plan.center);
    let outer = dist.iter().copied().max().unwrap_or(0);
    let shell_min = |i: usize| {
        (0..g.len()).filter(|&x| dist[x] == outer).map(|x| model.potential(i).values()[x]).fold(f64::INFINITY, f64::min)
    };
    let outer_shell_min_potential = [shell_min(0), shell_min(1)];

    let mut au = Auditor { g, model, plan, points: sample_points(g, plan), checks: Vec::new() };

    au.push(
        Hypothesis::V,
        Verdict::NotCheckableOnFiniteGraph,
        None,
        format!(
            "inf V = ({}, {}) > 0; coercivity undecidable; min over outermost shell (distance {outer}) = ({}, {})",
            inf_v[0], inf_v[1], outer_shell_min_potential[0], outer_shell_min_potential[1]
        ),
    );

    let f0_bad = (0..g.len()).find(|&x| f.value(x, 0.0, 0.0) != 0.0);
    match f0_bad {
        Some(x) => au.push(
            Hypothesis::F0,
            Verdict::FailsWithWitness,
            Some(Witness { vertex: x, s: 0.0, t: 0.0, reference: None }),
            format!("F(x,0,0) = {}", f.value(x, 0.0, 0.0)),
        ),
        None => au.push(Hypothesis::F0, Verdict::PassesOnSamples, None, String::from("F(x,0,0) = 0 at every vertex")),
    }

    if meta.growth_bound.is_some() {
        au.scan(Hypothesis::F1, |_| true, "growth bound");
    } else {
        au.missing(Hypothesis::F1, "growth_bound")?;
    }

    // Limit of a(r)/r² as r → 0.
    match &meta.growth_bound {
        Some(bound) => {
            let ratios: Vec<f64> = (1..=6)
                .map(|k| {
                    let r = 10f64.powi(-k);
                    (bound.radial)(r) / (r * r)
                })
                .collect();
            let last = *ratios.last().unwrap();
            match meta.h {
                Some(h) if last.is_finite() && (last - h).abs() <= 1e-3 * (1.0 + h.abs()) => au.push(
                    Hypothesis::C1,
                    Verdict::PassesOnSamples,
                    None,
                    format!("a(r)/r² at r = 1e-6 is {last:e}, declared h = {h}"),
                ),
                Some(h) => au.push(
                    Hypothesis::C1,
                    Verdict::NotCheckableOnFiniteGraph,
                    None,
                    format!("a(r)/r² at r = 1e-6 is {last:e}, declared h = {h}; trend inconclusive"),
                ),
                None => au.push(
                    Hypothesis::C1,
                    Verdict::NotCheckableOnFiniteGraph,
                    None,
                    format!("no h declared; a(r)/r² at r = 1e-6 is {last:e}"),
                ),
            }
        }
        None => au.missing(Hypothesis::C1, "growth_bound")?,
    }

    // Ring positivity α*.
    let mut rho_star = None;
    let mut alpha_star = None;
    match &meta.growth_bound {
        Some(bound) => {
            let mass = match bound.weight.is_empty() {
                true => g.measure().iter().sum(),
                false => integral_raw(g, &bound.weight),
            };
            let c = gamma_inf[0] + gamma_inf[1];
            let radial = |r: f64| (bound.radial)(r);
            let alpha = |rho: f64, grid: usize| {
                let (amax, s, t) = max_over_l1_ball(&radial, c * rho, grid);
                (0.25 * rho * rho - amax * mass, s, t)
            };
            let rho = match meta.rho_star {
                Some(r) => r,
                None => {
                    let mut best = (f64::NEG_INFINITY, 1.0);
                    for k in 0..=60 {
                        let r = 10f64.powf(-4.0 + 6.0 * k as f64 / 60.0);
                        let (a, _, _) = alpha(r, 21);
                        if a > best.0 {
                            best = (a, r);
                        }
                    }
                    best.1
                }
            };
            let (a, s, t) = alpha(rho, plan.grid);
            rho_star = Some(rho);
            alpha_star = Some(a);
            let how = if meta.rho_star.is_some() { "declared" } else { "searched" };
            if a > 0.0 {
                au.push(Hypothesis::C2, Verdict::PassesOnSamples, None, format!("{how} ρ* = {rho:e}, α* = {a:e}"));
            } else {
                au.push(
                    Hypothesis::C2,
                    Verdict::FailsWithWitness,
                    Some(Witness { vertex: plan.center, s, t, reference: Some((rho, mass)) }),
                    format!("{how} ρ* = {rho:e}, α* = {a:e} ≤ 0"),
                );
            }
        }
        None => au.missing(Hypothesis::C2, "growth_bound")?,
    }

    // Superlinear growth trend along rays.
    let mut trend_witness = None;
    'rays: for x in 0..g.len().min(16) {
        for k in 0..plan.rays.max(1) {
            let angle = core::f64::consts::TAU * (k as f64 + 0.5) / plan.rays.max(1) as f64;
            let (cs, sn) = (angle.cos(), angle.sin());
            let mut prev: Option<(f64, f64)> = None;
            for &r in &plan.ray_radii {
                let (s, t) = (r * cs, r * sn);
                let value = f.value(x, s, t) / r.powf(theta);
                if value.is_nan() {
                    break;
                }
                if let Some((s0, t0)) = prev {
                    let w = Witness { vertex: x, s, t, reference: Some((s0, t0)) };
                    if witness_violates(g, model, Hypothesis::F2, &w) {
                        trend_witness = Some(w);
                        break 'rays;
                    }
                }
                prev = Some((s, t));
            }
        }
    }
    match trend_witness {
        Some(w) => {
            au.push(Hypothesis::F2, Verdict::FailsWithWitness, Some(w), format!("F/|(s,t)|^{theta} not increasing"))
        }
        None => au.push(
            Hypothesis::F2,
            Verdict::PassesOnSamples,
            None,
            format!("F/|(s,t)|^{theta} increasing along sampled rays"),
        ),
    }

    match meta.r0 {
        Some(r0) => au.scan(Hypothesis::F3, |r| r >= r0, "F ≥ 0 beyond r0"),
        None => au.missing(Hypothesis::F3, "r0")?,
    }

    match (meta.k, meta.c, meta.r0) {
        (Some(k), Some(_), Some(r0)) => {
            if !(k > 1.0) {
                au.push(Hypothesis::F4, Verdict::InvalidConstant, None, format!("k = {k} must exceed 1"));
            } else {
                // Both parts of the check only apply beyond r0 for the power bound;
                // 𝓕 ≥ 0 is scanned everywhere first.
                let neg = au.points.iter().map(|&(vertex, s, t)| Witness { vertex, s, t, reference: None }).find(|w| {
                    cal_f_with(f, theta, w.vertex, w.s, w.t) < -POINT_TOL * (1.0 + f.value(w.vertex, w.s, w.t).abs())
                });
                match neg {
                    Some(w) => au.push(Hypothesis::F4, Verdict::FailsWithWitness, Some(w), String::from("𝓕 < 0")),
                    None => au.scan(Hypothesis::F4, |r| r >= r0, "𝓕 ≥ 0 and power bound beyond r0"),
                }
            }
        }
        _ => {
            let neg = au
                .points
                .iter()
                .map(|&(vertex, s, t)| Witness { vertex, s, t, reference: None })
                .find(|w| witness_violates(g, model, Hypothesis::F4, w));
            match neg {
                Some(w) => au.push(Hypothesis::F4, Verdict::FailsWithWitness, Some(w), String::from("𝓕 < 0")),
                None if plan.strict => return Err(Error::MissingMetadata(String::from("F4 needs k, c, r0"))),
                None => au.push(
                    Hypothesis::F4,
                    Verdict::NotCheckableOnFiniteGraph,
                    None,
                    String::from("𝓕 ≥ 0 on samples; power bound skipped (missing metadata: k, c, r0)"),
                ),
            }
        }
    }

    match (meta.mu_ar, meta.sigma) {
        (Some(mu), Some(sigma)) => {
            let gmax = gamma2[0].powi(2).max(gamma2[1].powi(2));
            let upper = (mu - 2.0) / (2.0 * gmax);
            if !(mu > theta) {
                au.push(Hypothesis::F5, Verdict::InvalidConstant, None, format!("μ = {mu} must exceed θ = {theta}"));
            } else if !(sigma > 0.0 && sigma < upper) {
                au.push(Hypothesis::F5, Verdict::InvalidConstant, None, format!("σ = {sigma} outside (0, {upper})"));
            } else {
                au.scan(Hypothesis::F5, |_| true, "Ambrosetti-Rabinowitz with quadratic slack");
            }
        }
        _ => au.missing(Hypothesis::F5, "mu_ar, sigma")?,
    }

    au.scan(Hypothesis::F6, |_| true, "evenness");
    au.scan(Hypothesis::Partials, |_| true, "analytic vs finite-difference partials");

    let checks = au.checks;
    Ok(AuditReport {
        checks,
        constants: AuditConstants {
            theta,
            gamma,
            stated_ar_gamma2: [stated_ar_gamma2(mu_min, inf_v[0]), stated_ar_gamma2(mu_min, inf_v[1])],
            sharp_embedding_2: sharp,
            rho_star,
            alpha_star,
            outer_shell_min_potential,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind, Profile};
    use crate::model::{ClosureNonlinearity, Metadata, SexticPolynomial};
    use alloc::sync::Arc;

    fn path(n: usize) -> WeightedGraph {
        generate(GraphKind::Path(n), Profile::default(), Profile::default()).unwrap()
    }

    #[test]
    fn sextic_passes_the_pointwise_checks() {
        let g = path(5);
        let f = SexticPolynomial::new(vec![0.5; 5], vec![0.5; 5]).unwrap();
        let model = Model::uniform(&g, 1.0, [1.0, 1.0], 1.0, Arc::new(f)).unwrap();
        let report = audit(&g, &model, &SamplingPlan::default()).unwrap();
        for h in [
            Hypothesis::F0,
            Hypothesis::F1,
            Hypothesis::C1,
            Hypothesis::C2,
            Hypothesis::F2,
            Hypothesis::F3,
            Hypothesis::F4,
            Hypothesis::F5,
            Hypothesis::F6,
            Hypothesis::Partials,
        ] {
            assert_eq!(report.verdict(h), Some(Verdict::PassesOnSamples), "{h:?}: {:?}", report.check(h));
        }
        assert_eq!(report.verdict(Hypothesis::V), Some(Verdict::NotCheckableOnFiniteGraph));
        assert!(report.constants.alpha_star.unwrap() > 0.0);
        assert!(!report.any_failure());
    }

    #[test]
    fn odd_cubic_fails_evenness_at_one_zero() {
        let g = path(2);
        let f = ClosureNonlinearity::new("cubic", |_, s, _| s * s * s, |_, s, _| [3.0 * s * s, 0.0]);
        let model = Model::uniform(&g, 1.0, [0.0, 0.0], 1.0, Arc::new(f)).unwrap();
        let report = audit(&g, &model, &SamplingPlan::default()).unwrap();
        let c = report.check(Hypothesis::F6).unwrap();
        assert_eq!(c.verdict, Verdict::FailsWithWitness);
        let w = c.witness.unwrap();
        assert_eq!((w.s, w.t), (1.0, 0.0));
        assert!(witness_violates(&g, &model, Hypothesis::F6, &w));
        // Missing metadata is reported, or raised in strict mode.
        assert_eq!(report.verdict(Hypothesis::F3), Some(Verdict::NotCheckableOnFiniteGraph));
        let strict = SamplingPlan { strict: true, ..SamplingPlan::default() };
        assert_eq!(audit(&g, &model, &strict).unwrap_err().reason(), "MissingMetadata");
    }

    #[test]
    fn quartic_power_has_no_superquartic_growth() {
        let g = path(2);
        let f = ClosureNonlinearity::new("quartic", |_, s, _| s.powi(4), |_, s, _| [4.0 * s.powi(3), 0.0])
            .with_metadata(Metadata { claims_even: true, ..Metadata::default() });
        let model = Model::uniform(&g, 1.0, [1.0, 1.0], 1.0, Arc::new(f)).unwrap();
        let report = audit(&g, &model, &SamplingPlan::default()).unwrap();
        let c = report.check(Hypothesis::F2).unwrap();
        assert_eq!(c.verdict, Verdict::FailsWithWitness);
        assert!(witness_violates(&g, &model, Hypothesis::F2, c.witness.as_ref().unwrap()));
    }

    #[test]
    fn sextic_growth_trend_is_monotone() {
        let f = SexticPolynomial::new(vec![0.5], vec![0.5]).unwrap();
        let mut last = 0.0;
        for r in [10.0, 100.0, 1000.0] {
            let ratio = crate::model::Nonlinearity::value(&f, 0, r, 0.0) / f64::powi(r, 4);
            assert!(ratio > last);
            last = ratio;
        }
    }
}
