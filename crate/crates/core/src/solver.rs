//! Finding critical points of the energy.
//!
//! * [`newton_solve`]: damped Newton on the residual, deflated against known
//!   roots so that it converges to new ones.
//! * [`mountain_pass`]: path deformation between the origin and a point of
//!   negative energy, finished by an undeflated Newton polish.
//! * [`antipode`]: the negated solution, re-verified.
//! * [`enumerate`]: all of the above, sorted into energy levels.
//!
//! Everything is deterministic given [`SolverConfig::seed`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::calculus::{assemble, AssembledOperators};
use crate::energy::{jacobian_apply_raw, jacobian_dense_raw, pairing_raw_pub, phi_raw, residual_raw, StatePair};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::{conjugate_gradient, dot, gmres, norm2, sup_norm, Cholesky, DenseMatrix, Lu};
use crate::model::Model;

/// Graphs up to this many vertices use dense factorizations under [`LinearSolve::Auto`].
pub const DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    NewtonDeflated,
    MountainPass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearSolve {
    /// Dense LU / Cholesky up to [`DENSE_LIMIT`] vertices, Krylov beyond.
    Auto,
    Dense,
    /// GMRES on the Jacobian action, CG on the Gram action, both Jacobi preconditioned.
    MatrixFree,
}

/// `M(x) = Π_w (1/‖x − w‖_E^power + shift)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deflation {
    pub power: f64,
    pub shift: f64,
}

impl Default for Deflation {
    fn default() -> Self {
        Self { power: 2.0, shift: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearch {
    pub factor: f64,
    pub max_halvings: usize,
}

impl Default for LineSearch {
    fn default() -> Self {
        Self { factor: 0.5, max_halvings: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MountainPassConfig {
    pub path_points: usize,
    pub max_deformations: usize,
    /// Initial step along the negative Riesz gradient.
    pub descent_step: f64,
    /// Residual sup-norm at the path maximum below which a Newton polish is tried.
    pub polish_below: f64,
}

impl Default for MountainPassConfig {
    fn default() -> Self {
        Self { path_points: 21, max_deformations: 500, descent_step: 0.5, polish_below: 0.1 }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub method: Method,
    /// Acceptance threshold on the sup-norm of the residual.
    pub tol_residual: f64,
    pub max_iters: usize,
    pub deflation: Deflation,
    pub line_search: LineSearch,
    pub mp: MountainPassConfig,
    /// Tried before any random start.
    pub initial_states: Vec<StatePair>,
    /// Random starts drawn by [`enumerate`].
    pub random_starts: usize,
    /// Shells `base · 2^j` for `j = 0..=shells`.
    pub shells: usize,
    /// Radius of the innermost shell; defaults to the nonlinearity's `rho_star`, then 0.25.
    pub shell_base: Option<f64>,
    /// Stop after this many consecutive starts without a new root.
    pub stall_limit: Option<usize>,
    pub linear_solve: LinearSolve,
    /// Let [`enumerate`] open with a mountain-pass run.
    pub mountain_pass_first: bool,
    /// Use finite-difference second partials when the nonlinearity has none.
    pub allow_fd_hessian: bool,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::NewtonDeflated,
            tol_residual: 1e-9,
            max_iters: 100,
            deflation: Deflation::default(),
            line_search: LineSearch::default(),
            mp: MountainPassConfig::default(),
            initial_states: Vec::new(),
            random_starts: 200,
            shells: 6,
            shell_base: None,
            stall_limit: None,
            linear_solve: LinearSolve::Auto,
            mountain_pass_first: true,
            allow_fd_hessian: true,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_residual > 0.0) {
            return Err(Error::BadParams(format!("tol_residual = {} must be > 0", self.tol_residual)));
        }
        if self.max_iters == 0 {
            return Err(Error::BadParams(String::from("max_iters must be positive")));
        }
        if self.mp.path_points < 3 {
            return Err(Error::BadParams(format!("path_points = {} must be ≥ 3", self.mp.path_points)));
        }
        if !(self.deflation.power > 0.0 && self.deflation.shift >= 0.0) {
            return Err(Error::BadParams(String::from("deflation needs power > 0 and shift ≥ 0")));
        }
        if !(self.line_search.factor > 0.0 && self.line_search.factor < 1.0) {
            return Err(Error::BadParams(String::from("line search factor must lie in (0, 1)")));
        }
        if let Some(b) = self.shell_base {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::BadParams(format!("shell_base = {b} must be > 0")));
            }
        }
        Ok(())
    }
}

/// How a record was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    NewtonDeflated,
    /// Undeflated Newton, used when a deflated run from the same start fails.
    Newton,
    MountainPass,
    Antipode,
    MultiStart,
}

impl Provenance {
    pub fn key(self) -> &'static str {
        match self {
            Provenance::NewtonDeflated => "newton_deflated",
            Provenance::Newton => "newton",
            Provenance::MountainPass => "mountain_pass",
            Provenance::Antipode => "antipode",
            Provenance::MultiStart => "multi_start",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        [
            Provenance::NewtonDeflated,
            Provenance::Newton,
            Provenance::MountainPass,
            Provenance::Antipode,
            Provenance::MultiStart,
        ]
        .into_iter()
        .find(|p| p.key() == key)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    pub id: usize,
    pub state: StatePair,
    /// `Φ(state)`, recomputed at acceptance.
    pub energy: f64,
    pub residual_sup: f64,
    pub method: Provenance,
    /// Ids of the roots the solve was deflated against (for an antipode, its source).
    pub deflated_against: Vec<usize>,
    pub iterations: usize,
    pub e_norm: f64,
    pub is_trivial: bool,
}

/// Below this `E`-norm a state counts as the trivial solution.
pub const TRIVIAL_NORM: f64 = 1e-8;
/// Two roots closer than this in `E`-distance are the same root.
pub const DEDUP_DISTANCE: f64 = 1e-6;
/// Energies closer than `LEVEL_TIE · (1 + |Φ|)` form one level.
pub const LEVEL_TIE: f64 = 1e-8;

const SMALL_GRAM: usize = 256;

/// The system in flat coordinates: `[u; v]`, or just `u` under scalar reduction.
struct Problem<'a> {
    g: &'a WeightedGraph,
    model: &'a Model,
    ops: AssembledOperators,
    n: usize,
    scalar: bool,
    dense: bool,
    allow_fd: bool,
    gram: Option<Cholesky>,
    /// Dense Gram matrix for small problems, where it beats sparse products.
    gram_small: Option<DenseMatrix>,
}

impl<'a> Problem<'a> {
    fn new(g: &'a WeightedGraph, model: &'a Model, config: &SolverConfig) -> Result<Self> {
        model.check(g)?;
        config.validate()?;
        let n = g.len();
        let dense = match config.linear_solve {
            LinearSolve::Auto => n <= DENSE_LIMIT,
            LinearSolve::Dense => true,
            LinearSolve::MatrixFree => false,
        };
        let mut p = Self {
            g,
            model,
            ops: assemble(g),
            n,
            scalar: model.is_scalar(),
            dense,
            allow_fd: config.allow_fd_hessian,
            gram: None,
            gram_small: None,
        };
        if p.dim() <= SMALL_GRAM {
            p.gram_small = Some(p.gram_dense());
        }
        Ok(p)
    }

    fn dim(&self) -> usize {
        if self.scalar {
            self.n
        } else {
            2 * self.n
        }
    }

    fn split<'x>(&self, x: &'x [f64]) -> (&'x [f64], &'x [f64]) {
        if self.scalar {
            (x, x)
        } else {
            x.split_at(self.n)
        }
    }

    fn state(&self, x: &[f64]) -> StatePair {
        let (u, v) = self.split(x);
        let mut flat = u.to_vec();
        flat.extend_from_slice(v);
        StatePair::from_flat_raw(self.g.tag(), &flat)
    }

    fn flatten(&self, s: &StatePair) -> Vec<f64> {
        if self.scalar {
            s.u.values().to_vec()
        } else {
            s.to_flat()
        }
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let (u, v) = self.split(x);
        let (mut r1, r2) = residual_raw(self.g, self.model, u, v);
        if !self.scalar {
            r1.extend(r2);
        }
        r1
    }

    /// Sup-norm over both components, also under scalar reduction.
    fn residual_sup(&self, x: &[f64]) -> f64 {
        let (u, v) = self.split(x);
        let (r1, r2) = residual_raw(self.g, self.model, u, v);
        let s = sup_norm(&r1).max(sup_norm(&r2));
        if s.is_nan() {
            f64::INFINITY
        } else {
            s
        }
    }

    fn phi(&self, x: &[f64]) -> f64 {
        let (u, v) = self.split(x);
        phi_raw(self.g, self.model, u, v).total
    }

    /// Euclidean gradient of `Φ` in flat coordinates: `μ R`.
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let (u, v) = self.split(x);
        let (r1, r2) = residual_raw(self.g, self.model, u, v);
        let mu = self.g.measure();
        if self.scalar {
            (0..self.n).map(|i| mu[i] * (r1[i] + r2[i])).collect()
        } else {
            (0..2 * self.n).map(|i| mu[i % self.n] * if i < self.n { r1[i] } else { r2[i - self.n] }).collect()
        }
    }

    /// `K d` for the product `E` Gram matrix.
    fn gram_apply(&self, d: &[f64]) -> Vec<f64> {
        if let Some(k) = &self.gram_small {
            return k.apply(d);
        }
        let n = self.n;
        let mu = &self.ops.mass;
        let block = |i: usize, w: &[f64]| -> Vec<f64> {
            let bw = self.ops.biharmonic.apply(w);
            let lw = self.ops.laplacian.apply(w);
            let a = self.model.a()[i];
            let vp = self.model.potential(i).values();
            (0..n).map(|x| mu[x] * (bw[x] - a * lw[x] + vp[x] * w[x])).collect()
        };
        if self.scalar {
            let (k1, k2) = (block(0, d), block(1, d));
            k1.iter().zip(&k2).map(|(a, b)| a + b).collect()
        } else {
            let mut out = block(0, &d[..n]);
            out.extend(block(1, &d[n..]));
            out
        }
    }

    fn e_norm2(&self, d: &[f64]) -> f64 {
        dot(d, &self.gram_apply(d)).max(0.0)
    }

    fn gram_dense(&self) -> DenseMatrix {
        let n = self.n;
        let k1 = self.ops.e_gram(self.model.a()[0], self.model.potential(0).values());
        let k2 = self.ops.e_gram(self.model.a()[1], self.model.potential(1).values());
        let dim = self.dim();
        let mut k = DenseMatrix::zeros(dim, dim);
        for i in 0..n {
            for j in 0..n {
                if self.scalar {
                    k[(i, j)] = k1[(i, j)] + k2[(i, j)];
                } else {
                    k[(i, j)] = k1[(i, j)];
                    k[(n + i, n + j)] = k2[(i, j)];
                }
            }
        }
        k
    }

    /// Solves `K y = p`.
    fn riesz(&mut self, p: &[f64]) -> Result<Vec<f64>> {
        if self.dense {
            if self.gram.is_none() {
                let chol = Cholesky::factor(&self.gram_dense())
                    .ok_or_else(|| Error::NoConvergence(String::from("E Gram matrix is not positive definite")))?;
                self.gram = Some(chol);
            }
            return Ok(self.gram.as_ref().unwrap().solve(p));
        }
        let diag = self.gram_diagonal();
        let res = conjugate_gradient(|d| self.gram_apply(d), &diag, p, 10 * self.dim() + 100, 1e-12);
        if res.converged || res.residual < 1e-8 {
            Ok(res.x)
        } else {
            Err(Error::NoConvergence(format!("Gram solve stalled at relative residual {:e}", res.residual)))
        }
    }

    fn gram_diagonal(&self) -> Vec<f64> {
        let n = self.n;
        let (bd, ld) = (self.ops.biharmonic.diagonal(), self.ops.laplacian.diagonal());
        let comp = |i: usize| -> Vec<f64> {
            let a = self.model.a()[i];
            let vp = self.model.potential(i).values();
            (0..n).map(|x| self.ops.mass[x] * (bd[x] - a * ld[x] + vp[x])).collect()
        };
        if self.scalar {
            comp(0).iter().zip(comp(1)).map(|(a, b)| a + b).collect()
        } else {
            let mut d = comp(0);
            d.extend(comp(1));
            d
        }
    }

    fn jacobian_dense(&self, x: &[f64]) -> Result<DenseMatrix> {
        let (u, v) = self.split(x);
        let full = jacobian_dense_raw(self.g, self.model, &self.ops, u, v, self.allow_fd)?;
        if !self.scalar {
            return Ok(full);
        }
        let n = self.n;
        let mut j = DenseMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                j[(r, c)] = full[(r, c)] + full[(r, n + c)];
            }
        }
        Ok(j)
    }

    fn jacobian_apply(&self, x: &[f64], d: &[f64]) -> Result<Vec<f64>> {
        let (u, v) = self.split(x);
        let (p, r) = self.split(d);
        let (mut j1, j2) = jacobian_apply_raw(self.g, self.model, u, v, p, r, self.allow_fd)?;
        if !self.scalar {
            j1.extend(j2);
        }
        Ok(j1)
    }

    /// Diagonal of the Jacobian, for preconditioning. Exact on small
    /// problems, from the operator diagonals otherwise.
    fn jacobian_diagonal(&self, x: &[f64]) -> Result<Vec<f64>> {
        let dim = self.dim();
        if dim > 512 {
            return Ok(self.approx_jacobian_diagonal(x));
        }
        let mut diag = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            diag.push(self.jacobian_apply(x, &e)?[i]);
        }
        Ok(diag)
    }

    fn approx_jacobian_diagonal(&self, x: &[f64]) -> Vec<f64> {
        let (bd, ld) = (self.ops.biharmonic.diagonal(), self.ops.laplacian.diagonal());
        let (u, v) = self.split(x);
        let f = self.model.nonlinearity();
        let mut out = Vec::with_capacity(self.dim());
        let comps = if self.scalar { 1 } else { 2 };
        for i in 0..comps {
            let a = self.model.a()[i];
            let vp = self.model.potential(i).values();
            for z in 0..self.n {
                let h = f.hessian(z, u[z], v[z]).unwrap_or([0.0; 3]);
                out.push(bd[z] - a * ld[z] + vp[z] - if i == 0 { h[0] } else { h[2] });
            }
        }
        out
    }

    /// Solves `J δ = −r`.
    fn newton_direction(&self, x: &[f64], r: &[f64], iteration: usize) -> Result<Vec<f64>> {
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        if self.dense {
            let lu = Lu::factor(self.jacobian_dense(x)?).ok_or(Error::SingularJacobian(iteration))?;
            let d = lu.solve(&rhs);
            if d.iter().all(|v| v.is_finite()) {
                return Ok(d);
            }
            return Err(Error::SingularJacobian(iteration));
        }
        let diag = self.jacobian_diagonal(x)?;
        let mut failure = None;
        let res = gmres(
            |d| match self.jacobian_apply(x, d) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    vec![0.0; d.len()]
                }
            },
            &diag,
            &rhs,
            50,
            40,
            1e-12,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        if res.converged || res.residual < 1e-8 {
            Ok(res.x)
        } else {
            Err(Error::SingularJacobian(iteration))
        }
    }

    fn record(&self, x: &[f64], method: Provenance, deflated_against: Vec<usize>, iterations: usize) -> SolutionRecord {
        let e_norm = self.e_norm2(x).sqrt();
        SolutionRecord {
            id: 0,
            state: self.state(x),
            energy: self.phi(x),
            residual_sup: self.residual_sup(x),
            method,
            deflated_against,
            iterations,
            e_norm,
            is_trivial: e_norm < TRIVIAL_NORM,
        }
    }
}

struct Deflator<'p> {
    roots: &'p [Vec<f64>],
    power: f64,
    shift: f64,
}

impl Deflator<'_> {
    fn log_m(&self, p: &Problem<'_>, x: &[f64]) -> f64 {
        self.roots
            .iter()
            .map(|w| {
                let d: Vec<f64> = x.iter().zip(w).map(|(a, b)| a - b).collect();
                let nd2 = p.e_norm2(&d);
                (nd2.powf(-0.5 * self.power) + self.shift).ln()
            })
            .sum()
    }

    /// `Σ_i (∇m_i · δ) / m_i`.
    fn slope(&self, p: &Problem<'_>, x: &[f64], delta: &[f64]) -> f64 {
        self.roots
            .iter()
            .map(|w| {
                let d: Vec<f64> = x.iter().zip(w).map(|(a, b)| a - b).collect();
                let kd = p.gram_apply(&d);
                let nd2 = dot(&d, &kd);
                if nd2 < 1e-300 {
                    return 0.0;
                }
                let m = nd2.powf(-0.5 * self.power) + self.shift;
                let grad_dot = -self.power * nd2.powf(-0.5 * self.power - 1.0) * dot(&kd, delta);
                grad_dot / m
            })
            .sum()
    }
}

/// A Newton run whose merit drops by less than `STAGNATION_DROP` over
/// `STAGNATION_WINDOW` iterations is sitting near a non-root minimum of the
/// residual and is abandoned.
const STAGNATION_WINDOW: usize = 10;
const STAGNATION_DROP: f64 = 1e-2;

/// Core Newton loop in flat coordinates. Returns the root and the iteration count.
fn newton_flat(p: &Problem<'_>, config: &SolverConfig, x0: Vec<f64>, roots: &[Vec<f64>]) -> Result<(Vec<f64>, usize)> {
    let defl = Deflator { roots, power: config.deflation.power, shift: config.deflation.shift };
    let mut x = x0;
    let merit = |x: &[f64], r: &[f64]| {
        let v = defl.log_m(p, x) + norm2(r).ln();
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut r = p.residual(&x);
    let mut history: Vec<f64> = Vec::new();
    for it in 0..config.max_iters {
        let sup = p.residual_sup(&x);
        if sup <= config.tol_residual {
            return Ok((polish(p, x, &r, sup, it), it));
        }
        let delta = p.newton_direction(&x, &r, it)?;
        let mut tau = 1.0;
        if !roots.is_empty() {
            let t = 1.0 / (1.0 - defl.slope(p, &x, &delta));
            if t.is_finite() {
                tau = t;
            }
        }
        let current = merit(&x, &r);
        history.push(current);
        if it >= STAGNATION_WINDOW && history[it - STAGNATION_WINDOW] - current < STAGNATION_DROP {
            return Err(Error::NoConvergence(format!("stagnated at iteration {it}, residual {sup:e}")));
        }
        // Backtrack along the deflated step; if that fails, along the plain one.
        let mut accepted = None;
        let scales = [tau, 1.0];
        for &scale in &scales[..if tau == 1.0 { 1 } else { 2 }] {
            let mut lambda = scale;
            for _ in 0..=config.line_search.max_halvings {
                let trial: Vec<f64> = x.iter().zip(&delta).map(|(a, d)| a + lambda * d).collect();
                let rt = p.residual(&trial);
                if rt.iter().all(|v| v.is_finite()) {
                    let m = merit(&trial, &rt);
                    if m < current || (m == f64::NEG_INFINITY) {
                        accepted = Some((trial, rt));
                        break;
                    }
                }
                lambda *= config.line_search.factor;
            }
            if accepted.is_some() {
                break;
            }
        }
        match accepted {
            Some((xn, rn)) => {
                x = xn;
                r = rn;
            }
            None => {
                return Err(Error::NoConvergence(format!("line search failed at iteration {it}")));
            }
        }
    }
    if p.residual_sup(&x) <= config.tol_residual {
        return Ok((x, config.max_iters));
    }
    Err(Error::NoConvergence(format!("{} iterations, residual {:e}", config.max_iters, p.residual_sup(&x))))
}

/// One extra undeflated Newton step, kept only if it lowers the residual.
fn polish(p: &Problem<'_>, x: Vec<f64>, r: &[f64], sup: f64, it: usize) -> Vec<f64> {
    if sup == 0.0 {
        return x;
    }
    match p.newton_direction(&x, r, it) {
        Ok(d) => {
            let y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
            if p.residual_sup(&y) < sup {
                y
            } else {
                x
            }
        }
        Err(_) => x,
    }
}

/// Damped Newton from `start`, deflated against `known`.
pub fn newton_solve(
    g: &WeightedGraph,
    model: &Model,
    config: &SolverConfig,
    start: &StatePair,
    known: &[SolutionRecord],
) -> Result<SolutionRecord> {
    start.check(g)?;
    let p = Problem::new(g, model, config)?;
    let roots: Vec<Vec<f64>> = known.iter().map(|k| p.flatten(&k.state)).collect();
    let (x, iters) = newton_flat(&p, config, p.flatten(start), &roots)?;
    Ok(p.record(&x, Provenance::NewtonDeflated, known.iter().map(|k| k.id).collect(), iters))
}

fn resample_path(p: &Problem<'_>, path: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = path.len();
    let mut cum = vec![0.0; m];
    for j in 1..m {
        let d: Vec<f64> = path[j].iter().zip(&path[j - 1]).map(|(a, b)| a - b).collect();
        cum[j] = cum[j - 1] + p.e_norm2(&d).sqrt();
    }
    let total = cum[m - 1];
    if !(total > 0.0) {
        return path.to_vec();
    }
    let mut out = Vec::with_capacity(m);
    out.push(path[0].clone());
    let mut seg = 1;
    for j in 1..m - 1 {
        let target = total * j as f64 / (m - 1) as f64;
        while seg < m - 1 && cum[seg] < target {
            seg += 1;
        }
        let len = cum[seg] - cum[seg - 1];
        let s = if len > 0.0 { (target - cum[seg - 1]) / len } else { 0.0 };
        out.push(path[seg - 1].iter().zip(&path[seg]).map(|(a, b)| a + s * (b - a)).collect());
    }
    out.push(path[m - 1].clone());
    out
}

/// Mountain-pass critical point between the origin and `far_point`.
///
/// `far_point` is doubled until its energy is negative. The highest interior
/// node of the discretized path is pushed down the `E`-gradient and the path
/// is resampled by `E`-arclength; once the residual at the top is small a
/// Newton polish finishes the job.
pub fn mountain_pass(
    g: &WeightedGraph,
    model: &Model,
    config: &SolverConfig,
    far_point: &StatePair,
) -> Result<SolutionRecord> {
    far_point.check(g)?;
    let mut p = Problem::new(g, model, config)?;
    let mut end = p.flatten(far_point);
    if p.e_norm2(&end) < TRIVIAL_NORM * TRIVIAL_NORM {
        return Err(Error::BadFarPoint);
    }
    let mut doublings = 0;
    while !(p.phi(&end) < 0.0) {
        if doublings == 60 {
            return Err(Error::BadFarPoint);
        }
        end.iter_mut().for_each(|v| *v *= 2.0);
        doublings += 1;
    }
    let m = config.mp.path_points;
    let mut path: Vec<Vec<f64>> = (0..m).map(|j| end.iter().map(|v| v * j as f64 / (m - 1) as f64).collect()).collect();
    let mut polish_below = config.mp.polish_below;
    for it in 0..config.mp.max_deformations {
        let energies: Vec<f64> = path.iter().map(|x| p.phi(x)).collect();
        let k = (1..m - 1).fold(1, |best, j| if energies[j] > energies[best] { j } else { best });
        let top = path[k].clone();
        let sup = p.residual_sup(&top);
        if sup <= config.tol_residual && p.e_norm2(&top).sqrt() >= TRIVIAL_NORM {
            return Ok(p.record(&top, Provenance::MountainPass, Vec::new(), it));
        }
        if sup <= polish_below {
            if let Ok((x, n_it)) = newton_flat(&p, config, top.clone(), &[]) {
                let d: Vec<f64> = x.iter().zip(&top).map(|(a, b)| a - b).collect();
                let local = p.e_norm2(&d).sqrt() <= 0.5 * p.e_norm2(&top).sqrt();
                if local && p.e_norm2(&x).sqrt() >= TRIVIAL_NORM && p.phi(&x) > 0.0 {
                    return Ok(p.record(&x, Provenance::MountainPass, Vec::new(), it + n_it));
                }
            }
            polish_below *= 0.1;
        }
        let grad = p.riesz(&p.gradient(&top))?;
        let mut step = config.mp.descent_step;
        let mut moved = false;
        for _ in 0..=config.line_search.max_halvings {
            let trial: Vec<f64> = top.iter().zip(&grad).map(|(a, d)| a - step * d).collect();
            if p.phi(&trial) < energies[k] {
                path[k] = trial;
                moved = true;
                break;
            }
            step *= config.line_search.factor;
        }
        if !moved {
            return Err(Error::NoConvergence(format!("mountain-pass descent stalled at deformation {it}")));
        }
        path = resample_path(&p, &path);
    }
    Err(Error::NoConvergence(format!("{} path deformations", config.mp.max_deformations)))
}

/// The record for `(−u, −v)`, re-verified against `tol`.
pub fn antipode(g: &WeightedGraph, model: &Model, record: &SolutionRecord, tol: f64) -> Result<SolutionRecord> {
    let config = SolverConfig::default();
    let p = Problem::new(g, model, &config)?;
    record.state.check(g)?;
    let x: Vec<f64> = p.flatten(&record.state).iter().map(|v| -v).collect();
    let mut out = p.record(&x, Provenance::Antipode, vec![record.id], 0);
    if out.residual_sup > tol {
        return Err(Error::SymmetryViolated(out.residual_sup));
    }
    let diff = (out.energy - record.energy).abs();
    if diff > 1e-10 * (1.0 + record.energy.abs()) {
        return Err(Error::SymmetryViolated(diff));
    }
    if record.is_trivial {
        out = record.clone();
    }
    Ok(out)
}

/// `E`-distance between two states.
pub fn e_distance(g: &WeightedGraph, model: &Model, a: &StatePair, b: &StatePair) -> Result<f64> {
    crate::energy::e_norm(g, model, &a.axpy(-1.0, b))
}

/// One energy level of an enumeration: a representative and its antipode.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLevel {
    pub energy: f64,
    pub representative: SolutionRecord,
    pub antipode: Option<SolutionRecord>,
    /// Number of distinct antipodal pairs found at this energy.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    FoundFewer { found: usize, requested: usize },
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Up to `K` levels, energies strictly increasing.
    pub levels: Vec<EnergyLevel>,
    /// Every accepted nontrivial root, antipodes included, in acceptance order.
    pub all_roots: Vec<SolutionRecord>,
    pub mountain_pass: Option<SolutionRecord>,
    pub mountain_pass_error: Option<Error>,
    pub starts_tried: usize,
    pub failed_starts: usize,
    pub outcome: Outcome,
}

impl Enumeration {
    /// `(k, Φ_k)` for the returned levels, `k` from 1.
    pub fn energy_table(&self) -> Vec<(usize, f64)> {
        self.levels.iter().enumerate().map(|(k, l)| (k + 1, l.energy)).collect()
    }

    /// The returned solutions: each level's representative followed by its antipode.
    pub fn solutions(&self) -> Vec<SolutionRecord> {
        self.levels.iter().flat_map(|l| core::iter::once(l.representative.clone()).chain(l.antipode.clone())).collect()
    }
}

struct RootSet<'p, 'a> {
    p: &'p Problem<'a>,
    flats: Vec<Vec<f64>>,
    records: Vec<SolutionRecord>,
}

impl RootSet<'_, '_> {
    fn contains(&self, x: &[f64]) -> bool {
        self.flats.iter().any(|w| {
            let d: Vec<f64> = x.iter().zip(w).map(|(a, b)| a - b).collect();
            self.p.e_norm2(&d).sqrt() <= DEDUP_DISTANCE
        })
    }

    fn push(&mut self, mut rec: SolutionRecord) -> usize {
        rec.id = self.records.len() + 1;
        self.flats.push(self.p.flatten(&rec.state));
        self.records.push(rec);
        self.records.len()
    }
}

fn sign_key(x: &[f64]) -> bool {
    x.iter().find(|v| v.abs() > 1e-8).is_none_or(|v| *v > 0.0)
}

/// Mountain pass, then deflated Newton from random starts on `E`-norm shells.
/// Returns the `K` lowest energy levels found, one antipodal pair each.
pub fn enumerate(g: &WeightedGraph, model: &Model, config: &SolverConfig, k: usize) -> Result<Enumeration> {
    if k == 0 {
        return Err(Error::BadParams(String::from("K must be positive")));
    }
    let p = Problem::new(g, model, config)?;
    let claims_even = model.nonlinearity().metadata().claims_even;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let zero = vec![0.0; p.dim()];
    let trivial_is_root = p.residual_sup(&zero) <= config.tol_residual;
    let mut roots = RootSet { p: &p, flats: Vec::new(), records: Vec::new() };

    let accept = |roots: &mut RootSet<'_, '_>, rec: SolutionRecord| -> Result<bool> {
        let x = p.flatten(&rec.state);
        if rec.is_trivial || roots.contains(&x) {
            return Ok(false);
        }
        let id = roots.push(rec.clone());
        let mut rec = rec;
        rec.id = id;
        match antipode(g, model, &rec, config.tol_residual) {
            Ok(anti) => {
                if !roots.contains(&p.flatten(&anti.state)) {
                    roots.push(anti);
                }
            }
            Err(e @ Error::SymmetryViolated(_)) if claims_even => return Err(e),
            Err(_) => {}
        }
        Ok(true)
    };

    let (mut mp_record, mut mp_error) = (None, None);
    let far = {
        let ones = vec![1.0; g.len()];
        StatePair::from_vecs(g, ones.clone(), ones)?
    };
    if config.mountain_pass_first {
        match mountain_pass(g, model, config, &far) {
            Ok(rec) => {
                mp_record = Some(rec.clone());
                accept(&mut roots, rec)?;
            }
            Err(e) => mp_error = Some(e),
        }
    }

    let base = config.shell_base.or(model.nonlinearity().metadata().rho_star).unwrap_or(0.25);
    let deflation_set = |roots: &RootSet<'_, '_>| -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut flats = roots.flats.clone();
        let mut ids: Vec<usize> = roots.records.iter().map(|r| r.id).collect();
        if trivial_is_root {
            flats.push(zero.clone());
            ids.push(0);
        }
        (flats, ids)
    };

    let mut starts: Vec<Vec<f64>> = config.initial_states.iter().map(|s| p.flatten(s)).collect();
    let given = starts.len();
    starts.reserve(config.random_starts);
    let (mut tried, mut failed, mut stall) = (0, 0, 0);
    for i in 0..given + config.random_starts {
        let x0 = if i < given {
            starts[i].clone()
        } else if (i - given) % 2 == 1 && !roots.flats.is_empty() {
            // Neighbourhood start: a known root plus a random kick.
            let w = roots.flats[((i - given) / 2) % roots.flats.len()].clone();
            let radius = base * (1u64 << rng.random_range(0..=config.shells.min(60))) as f64;
            let z: Vec<f64> = (0..p.dim()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let nz = p.e_norm2(&z).sqrt();
            w.iter().zip(&z).map(|(a, v)| a + v * radius / nz).collect()
        } else {
            // Shell j is the annulus base·2^j ≤ ‖x‖_E ≤ base·2^(j+1).
            let j = ((i - given) / 2) % (config.shells + 1);
            let radius = base * (1u64 << j.min(60)) as f64 * (1.0 + rng.random::<f64>());
            let z: Vec<f64> = (0..p.dim()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let nz = p.e_norm2(&z).sqrt();
            z.iter().map(|v| v * radius / nz).collect()
        };
        // Reuse the start while deflation keeps producing new roots from it.
        let mut found = false;
        loop {
            tried += 1;
            let (flats, ids) = deflation_set(&roots);
            let new_root = match newton_flat(&p, config, x0.clone(), &flats) {
                Ok((x, iters)) => accept(&mut roots, p.record(&x, Provenance::NewtonDeflated, ids, iters))?,
                Err(Error::NoConvergence(_)) | Err(Error::SingularJacobian(_)) => {
                    failed += 1;
                    false
                }
                Err(e) => return Err(e),
            };
            if !new_root {
                break;
            }
            found = true;
        }
        if !found {
            // Deflation can strand an iterate at a non-root minimum of the
            // deflated residual; a plain Newton run from the same start still
            // counts if it lands on a root not seen before.
            tried += 1;
            if let Ok((x, iters)) = newton_flat(&p, config, x0, &[]) {
                let (_, ids) = deflation_set(&roots);
                found = accept(&mut roots, p.record(&x, Provenance::Newton, ids, iters))?;
            }
        }
        stall = if found { 0 } else { stall + 1 };
        if let Some(limit) = config.stall_limit {
            if stall >= limit {
                break;
            }
        }
    }

    let levels = build_levels(&p, &roots.records, k);
    let outcome =
        if levels.len() < k { Outcome::FoundFewer { found: levels.len(), requested: k } } else { Outcome::Complete };
    Ok(Enumeration {
        levels,
        all_roots: roots.records,
        mountain_pass: mp_record,
        mountain_pass_error: mp_error,
        starts_tried: tried,
        failed_starts: failed,
        outcome,
    })
}

fn build_levels(p: &Problem<'_>, records: &[SolutionRecord], k: usize) -> Vec<EnergyLevel> {
    let flats: Vec<Vec<f64>> = records.iter().map(|r| p.flatten(&r.state)).collect();
    let mut used = vec![false; records.len()];
    let mut pairs: Vec<(SolutionRecord, Option<SolutionRecord>)> = Vec::new();
    for i in 0..records.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let neg: Vec<f64> = flats[i].iter().map(|v| -v).collect();
        let partner = (0..records.len()).find(|&j| {
            !used[j] && {
                let d: Vec<f64> = flats[j].iter().zip(&neg).map(|(a, b)| a - b).collect();
                p.e_norm2(&d).sqrt() <= DEDUP_DISTANCE
            }
        });
        let (mut a, mut b) = (records[i].clone(), partner.map(|j| records[j].clone()));
        if let Some(j) = partner {
            used[j] = true;
            if !sign_key(&flats[i]) {
                core::mem::swap(&mut a, b.as_mut().unwrap());
            }
        }
        pairs.push((a, b));
    }
    pairs.sort_by(|x, y| x.0.energy.total_cmp(&y.0.energy).then(x.0.id.cmp(&y.0.id)));
    let mut levels: Vec<EnergyLevel> = Vec::new();
    for (rep, anti) in pairs {
        match levels.last_mut() {
            Some(l) if (rep.energy - l.energy).abs() <= LEVEL_TIE * (1.0 + l.energy.abs()) => l.multiplicity += 1,
            _ => {
                if levels.len() == k {
                    break;
                }
                levels.push(EnergyLevel { energy: rep.energy, representative: rep, antipode: anti, multiplicity: 1 });
            }
        }
    }
    levels
}

/// Undeflated Newton from `starts` uniform random points in `[−radius, radius]^dim`,
/// deduplicated. Independent of [`enumerate`]; meant as a cross-check.
pub fn multi_start(
    g: &WeightedGraph,
    model: &Model,
    config: &SolverConfig,
    starts: usize,
    radius: f64,
) -> Result<Vec<SolutionRecord>> {
    let p = Problem::new(g, model, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut roots = RootSet { p: &p, flats: Vec::new(), records: Vec::new() };
    for _ in 0..starts {
        let x0: Vec<f64> = (0..p.dim()).map(|_| radius * (2.0 * rng.random::<f64>() - 1.0)).collect();
        match newton_flat(&p, config, x0, &[]) {
            Ok((x, iters)) => {
                if !roots.contains(&x) {
                    roots.push(p.record(&x, Provenance::MultiStart, Vec::new(), iters));
                }
            }
            Err(Error::NoConvergence(_)) | Err(Error::SingularJacobian(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(roots.records)
}

/// `|⟨Φ'(state), δ⟩| ≤ 10 · tol · ‖δ‖_E` for `directions` random `δ`.
pub fn weak_form_check(
    g: &WeightedGraph,
    model: &Model,
    state: &StatePair,
    tol: f64,
    directions: usize,
    seed: u64,
) -> Result<bool> {
    model.check(g)?;
    state.check(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..directions {
        let mut d: Vec<f64> = (0..2 * g.len()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        if model.is_scalar() {
            let n = g.len();
            for i in 0..n {
                d[n + i] = d[i];
            }
        }
        let dir = StatePair::from_flat_raw(g.tag(), &d);
        let pairing = pairing_raw_pub(g, model, state, &dir);
        let norm = crate::energy::e_norm(g, model, &dir)?;
        if pairing.abs() > 10.0 * tol * norm {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind, Profile};
    use crate::model::PowerLaw;
    use alloc::sync::Arc;

    fn single() -> (WeightedGraph, Model) {
        let g = generate(GraphKind::Path(1), Profile::default(), Profile::default()).unwrap();
        let f = PowerLaw::symmetric(4.0, 4.0, 4.0).unwrap();
        let m = Model::uniform(&g, 1.0, [0.0, 0.0], 1.0, Arc::new(f)).unwrap();
        (g, m)
    }

    fn st(g: &WeightedGraph, u: f64, v: f64) -> StatePair {
        StatePair::from_vecs(g, vec![u], vec![v]).unwrap()
    }

    #[test]
    fn trivial_start_is_a_root() {
        let (g, m) = single();
        let r = newton_solve(&g, &m, &SolverConfig::default(), &st(&g, 0.0, 0.0), &[]).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.is_trivial);
    }

    #[test]
    fn scalar_newton_and_deflation() {
        let (g, m) = single();
        let m = m.with_scalar_reduction().unwrap();
        let cfg = SolverConfig::default();
        let one = newton_solve(&g, &m, &cfg, &st(&g, 1.2, 1.2), &[]).unwrap();
        assert!((one.state.u.values()[0] - 1.0).abs() < 1e-12, "{one:?}");
        let zero = newton_solve(&g, &m, &cfg, &st(&g, 0.0, 0.0), &[]).unwrap();
        let minus = newton_solve(&g, &m, &cfg, &st(&g, -1.2, -1.2), &[one.clone(), zero]).unwrap();
        assert!((minus.state.u.values()[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn mountain_pass_single_vertex() {
        let (g, m) = single();
        let r = mountain_pass(&g, &m, &SolverConfig::default(), &st(&g, 2.0, 0.0)).unwrap();
        assert!((r.energy - 0.25).abs() < 1e-8, "{r:?}");
        assert!((r.state.u.values()[0].abs() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn antipode_of_trivial_is_itself() {
        let (g, m) = single();
        let r = newton_solve(&g, &m, &SolverConfig::default(), &st(&g, 0.0, 0.0), &[]).unwrap();
        assert_eq!(antipode(&g, &m, &r, 1e-9).unwrap(), r);
    }

    #[test]
    fn enumerate_rejects_zero_k() {
        let (g, m) = single();
        assert_eq!(enumerate(&g, &m, &SolverConfig::default(), 0).unwrap_err().reason(), "BadParams");
    }
}
