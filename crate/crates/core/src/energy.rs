//! The energy functional and its derivatives.
//!
//! ```text
//! Φ(u,v) = ½‖u‖²_{E₁} + ½‖v‖²_{E₂} + (b₁/4) q(u)² + (b₂/4) q(v)² − ∫ F(x,u,v) dμ
//! q(u)   = ∫ |∇u|² dμ
//! R₁     = Δ²u − (a₁ + b₁ q(u)) Δu + V₁ u − F_u(x,u,v)
//! ```
//!
//! `⟨Φ'(u,v), (φ₁,φ₂)⟩ = ∫ R₁φ₁ dμ + ∫ R₂φ₂ dμ`. The pairing is computed from
//! its weak form and the residual from the strong form so that tests can
//! compare them.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::calculus::{
    biharmonic_from_laplacian, gamma_integral_raw, ghost_laplacian_raw, integral_raw, laplacian_pairing_raw,
    laplacian_raw, AssembledOperators, VertexFunction,
};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::DenseMatrix;
use crate::model::{cal_f, fd_hessian, Model};

/// A pair `(u, v)` of functions on one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    pub u: VertexFunction,
    pub v: VertexFunction,
}

impl StatePair {
    pub fn new(g: &WeightedGraph, u: VertexFunction, v: VertexFunction) -> Result<Self> {
        u.check(g)?;
        v.check(g)?;
        Ok(Self { u, v })
    }

    pub fn from_vecs(g: &WeightedGraph, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        Ok(Self { u: VertexFunction::new(g, u)?, v: VertexFunction::new(g, v)? })
    }

    pub fn zeros(g: &WeightedGraph) -> Self {
        Self { u: VertexFunction::zeros(g), v: VertexFunction::zeros(g) }
    }

    /// `[u; v]` as one vector of length `2n`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut x = self.u.values().to_vec();
        x.extend_from_slice(self.v.values());
        x
    }

    pub fn from_flat(g: &WeightedGraph, x: &[f64]) -> Result<Self> {
        let n = g.len();
        if x.len() != 2 * n {
            return Err(Error::LengthMismatch { expected: 2 * n, got: x.len() });
        }
        Self::from_vecs(g, x[..n].to_vec(), x[n..].to_vec())
    }

    pub(crate) fn from_flat_raw(tag: u64, x: &[f64]) -> Self {
        let n = x.len() / 2;
        Self { u: VertexFunction::from_raw(tag, x[..n].to_vec()), v: VertexFunction::from_raw(tag, x[n..].to_vec()) }
    }

    /// `(−u, −v)`.
    pub fn negated(&self) -> Self {
        let neg = |f: &VertexFunction| VertexFunction::from_raw(f.graph_tag(), f.values().iter().map(|x| -x).collect());
        Self { u: neg(&self.u), v: neg(&self.v) }
    }

    /// `self + h·d`.
    pub fn axpy(&self, h: f64, d: &StatePair) -> Self {
        let comb = |a: &VertexFunction, b: &VertexFunction| {
            VertexFunction::from_raw(a.graph_tag(), a.values().iter().zip(b.values()).map(|(x, y)| x + h * y).collect())
        };
        Self { u: comb(&self.u, &d.u), v: comb(&self.v, &d.v) }
    }

    pub fn check(&self, g: &WeightedGraph) -> Result<()> {
        self.u.check(g)?;
        self.v.check(g)
    }

    /// Largest absolute value over both components.
    pub fn sup_norm(&self) -> f64 {
        self.u.values().iter().chain(self.v.values()).fold(0.0, |m, x| m.max(x.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// `½‖u‖²_{E₁}`.
    pub quad_u: f64,
    pub quad_v: f64,
    /// `(b₁/4) q(u)²`.
    pub kirchhoff_u: f64,
    pub kirchhoff_v: f64,
    /// `∫ F(x,u,v) dμ`.
    pub potential_term: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CeramiDiagnostics {
    pub theta: f64,
    pub phi: f64,
    pub self_pairing: f64,
    /// `∫ 𝓕(x,u,v) dμ`.
    pub calf_integral: f64,
    /// `((θ−2)/(2θ)) (‖u‖²_{E₁} + ‖v‖²_{E₂})`, a quarter of the norms when θ = 4.
    pub quarter_norms: f64,
    /// `(¼ − 1/θ)(b₁q(u)² + b₂q(v)²)`, zero when θ = 4.
    pub kirchhoff_correction: f64,
    pub gap: f64,
}

/// Per-component quantities shared by the functional and its derivatives.
struct Component {
    lu: Vec<f64>,
    ghost: Vec<f64>,
    q: f64,
}

impl Component {
    fn new(g: &WeightedGraph, u: &[f64]) -> Self {
        let mut lu = vec![0.0; g.len()];
        laplacian_raw(g, u, &mut lu);
        Self { ghost: ghost_laplacian_raw(g, u), q: gamma_integral_raw(g, u, u), lu }
    }

    /// `‖u‖²_E`.
    fn norm2(&self, g: &WeightedGraph, a: f64, vpot: &[f64], u: &[f64]) -> f64 {
        let pot: f64 = (0..g.len()).map(|x| g.measure()[x] * vpot[x] * u[x] * u[x]).sum();
        laplacian_pairing_raw(g, &self.lu, &self.ghost, &self.lu, &self.ghost) + a * self.q + pot
    }
}

pub(crate) fn phi_raw(g: &WeightedGraph, model: &Model, u: &[f64], v: &[f64]) -> EnergyBreakdown {
    let (a, b) = (model.a(), model.b());
    let (cu, cv) = (Component::new(g, u), Component::new(g, v));
    let quad_u = 0.5 * cu.norm2(g, a[0], model.potential(0).values(), u);
    let quad_v = 0.5 * cv.norm2(g, a[1], model.potential(1).values(), v);
    let kirchhoff_u = 0.25 * b[0] * cu.q * cu.q;
    let kirchhoff_v = 0.25 * b[1] * cv.q * cv.q;
    let f = model.nonlinearity();
    let potential_term: f64 = (0..g.len()).map(|x| g.measure()[x] * f.value(x, u[x], v[x])).sum();
    EnergyBreakdown {
        quad_u,
        quad_v,
        kirchhoff_u,
        kirchhoff_v,
        potential_term,
        total: quad_u + quad_v + kirchhoff_u + kirchhoff_v - potential_term,
    }
}

pub(crate) fn residual_raw(g: &WeightedGraph, model: &Model, u: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = g.len();
    let (a, b) = (model.a(), model.b());
    let f = model.nonlinearity();
    let mut out = [vec![0.0; n], vec![0.0; n]];
    for (i, w) in [u, v].into_iter().enumerate() {
        let c = Component::new(g, w);
        let mut bw = vec![0.0; n];
        biharmonic_from_laplacian(g, &c.lu, &c.ghost, &mut bw);
        let coef = a[i] + b[i] * c.q;
        let vpot = model.potential(i).values();
        for x in 0..n {
            let grad = f.gradient(x, u[x], v[x]);
            out[i][x] = bw[x] - coef * c.lu[x] + vpot[x] * w[x] - grad[i];
        }
    }
    let [r1, r2] = out;
    (r1, r2)
}

fn pairing_raw(g: &WeightedGraph, model: &Model, u: &[f64], v: &[f64], p: &[f64], r: &[f64]) -> f64 {
    let (a, b) = (model.a(), model.b());
    let f = model.nonlinearity();
    let mut total = 0.0;
    for (i, (w, d)) in [(u, p), (v, r)].into_iter().enumerate() {
        let c = Component::new(g, w);
        let cd = Component::new(g, d);
        let vpot = model.potential(i).values();
        let pot: f64 = (0..g.len()).map(|x| g.measure()[x] * vpot[x] * w[x] * d[x]).sum();
        total += laplacian_pairing_raw(g, &c.lu, &c.ghost, &cd.lu, &cd.ghost)
            + (a[i] + b[i] * c.q) * gamma_integral_raw(g, w, d)
            + pot;
    }
    let forcing: f64 = (0..g.len())
        .map(|x| {
            let [fs, ft] = f.gradient(x, u[x], v[x]);
            g.measure()[x] * (fs * p[x] + ft * r[x])
        })
        .sum();
    total - forcing
}

pub(crate) fn pairing_raw_pub(g: &WeightedGraph, model: &Model, state: &StatePair, dir: &StatePair) -> f64 {
    pairing_raw(g, model, state.u.values(), state.v.values(), dir.u.values(), dir.v.values())
}

fn hessian_at(model: &Model, x: usize, s: f64, t: f64, allow_fd: bool) -> Result<[f64; 3]> {
    let f = model.nonlinearity();
    match f.hessian(x, s, t) {
        Some(h) => Ok(h),
        None if allow_fd => Ok(fd_hessian(f, x, s, t)),
        None => Err(Error::MissingSecondPartials),
    }
}

pub(crate) fn jacobian_apply_raw(
    g: &WeightedGraph,
    model: &Model,
    u: &[f64],
    v: &[f64],
    p: &[f64],
    r: &[f64],
    allow_fd: bool,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = g.len();
    let (a, b) = (model.a(), model.b());
    let mut out = [vec![0.0; n], vec![0.0; n]];
    for (i, (w, d)) in [(u, p), (v, r)].into_iter().enumerate() {
        let c = Component::new(g, w);
        let cd = Component::new(g, d);
        let mut bd = vec![0.0; n];
        biharmonic_from_laplacian(g, &cd.lu, &cd.ghost, &mut bd);
        let coef = a[i] + b[i] * c.q;
        let chain = 2.0 * b[i] * gamma_integral_raw(g, w, d);
        let vpot = model.potential(i).values();
        for x in 0..n {
            out[i][x] = bd[x] - coef * cd.lu[x] - chain * c.lu[x] + vpot[x] * d[x];
        }
    }
    for x in 0..n {
        let [fss, fst, ftt] = hessian_at(model, x, u[x], v[x], allow_fd)?;
        out[0][x] -= fss * p[x] + fst * r[x];
        out[1][x] -= fst * p[x] + ftt * r[x];
    }
    let [j1, j2] = out;
    Ok((j1, j2))
}

/// Dense Jacobian of the flat residual `[R₁; R₂]` with respect to `[u; v]`.
pub(crate) fn jacobian_dense_raw(
    g: &WeightedGraph,
    model: &Model,
    ops: &AssembledOperators,
    u: &[f64],
    v: &[f64],
    allow_fd: bool,
) -> Result<DenseMatrix> {
    let n = g.len();
    let (a, b) = (model.a(), model.b());
    let mut j = DenseMatrix::zeros(2 * n, 2 * n);
    for (i, w) in [u, v].into_iter().enumerate() {
        let off = i * n;
        let c = Component::new(g, w);
        let coef = a[i] + b[i] * c.q;
        for x in 0..n {
            for (y, val) in ops.biharmonic.row(x) {
                j[(off + x, off + y)] += val;
            }
            for (y, val) in ops.laplacian.row(x) {
                j[(off + x, off + y)] -= coef * val;
            }
            j[(off + x, off + x)] += model.potential(i).values()[x];
        }
        if b[i] != 0.0 {
            let dw = ops.dirichlet.apply(w);
            for x in 0..n {
                let s = 2.0 * b[i] * c.lu[x];
                for y in 0..n {
                    j[(off + x, off + y)] -= s * dw[y];
                }
            }
        }
    }
    for x in 0..n {
        let [fss, fst, ftt] = hessian_at(model, x, u[x], v[x], allow_fd)?;
        j[(x, x)] -= fss;
        j[(x, n + x)] -= fst;
        j[(n + x, x)] -= fst;
        j[(n + x, n + x)] -= ftt;
    }
    Ok(j)
}

fn check(g: &WeightedGraph, model: &Model, states: &[&StatePair]) -> Result<()> {
    model.check(g)?;
    states.iter().try_for_each(|s| s.check(g))
}

pub fn phi(g: &WeightedGraph, model: &Model, state: &StatePair) -> Result<EnergyBreakdown> {
    check(g, model, &[state])?;
    Ok(phi_raw(g, model, state.u.values(), state.v.values()))
}

/// Strong-form residual of the system at `state`.
pub fn residual(g: &WeightedGraph, model: &Model, state: &StatePair) -> Result<StatePair> {
    check(g, model, &[state])?;
    let (r1, r2) = residual_raw(g, model, state.u.values(), state.v.values());
    Ok(StatePair { u: VertexFunction::from_raw(g.tag(), r1), v: VertexFunction::from_raw(g.tag(), r2) })
}

/// `max_x max(|R₁(x)|, |R₂(x)|)`.
pub fn residual_sup(g: &WeightedGraph, model: &Model, state: &StatePair) -> Result<f64> {
    Ok(residual(g, model, state)?.sup_norm())
}

/// `⟨Φ'(state), direction⟩`, evaluated in weak form.
pub fn phi_directional(g: &WeightedGraph, model: &Model, state: &StatePair, direction: &StatePair) -> Result<f64> {
    check(g, model, &[state, direction])?;
    Ok(pairing_raw(g, model, state.u.values(), state.v.values(), direction.u.values(), direction.v.values()))
}

/// `‖u‖² + ‖v‖² + b₁q(u)² + b₂q(v)² − ∫(F_u u + F_v v) dμ`.
pub fn self_pairing(g: &WeightedGraph, model: &Model, state: &StatePair) -> Result<f64> {
    check(g, model, &[state])?;
    let e = phi_raw(g, model, state.u.values(), state.v.values());
    Ok(self_pairing_from(g, model, state, &e))
}

fn self_pairing_from(g: &WeightedGraph, model: &Model, state: &StatePair, e: &EnergyBreakdown) -> f64 {
    let (u, v) = (state.u.values(), state.v.values());
    let f = model.nonlinearity();
    let forcing: f64 = (0..g.len())
        .map(|x| {
            let [fs, ft] = f.gradient(x, u[x], v[x]);
            g.measure()[x] * (fs * u[x] + ft * v[x])
        })
        .sum();
    2.0 * (e.quad_u + e.quad_v) + 4.0 * (e.kirchhoff_u + e.kirchhoff_v) - forcing
}

/// Evaluates both sides of
/// `Φ − (1/θ)⟨Φ', state⟩ = ∫𝓕 dμ + ((θ−2)/(2θ))(‖u‖² + ‖v‖²) + (¼ − 1/θ)(b₁q(u)² + b₂q(v)²)`.
pub fn cerami_identity(g: &WeightedGraph, model: &Model, state: &StatePair) -> Result<CeramiDiagnostics> {
    check(g, model, &[state])?;
    let (u, v) = (state.u.values(), state.v.values());
    let theta = model.theta();
    let e = phi_raw(g, model, u, v);
    let sp = self_pairing_from(g, model, state, &e);
    let calf: Vec<f64> = (0..g.len()).map(|x| cal_f(model, x, u[x], v[x])).collect();
    let calf_integral = integral_raw(g, &calf);
    let norms = 2.0 * (e.quad_u + e.quad_v);
    let quarter_norms = (theta - 2.0) / (2.0 * theta) * norms;
    let kirchhoff_correction = (1.0 - 4.0 / theta) * (e.kirchhoff_u + e.kirchhoff_v);
    let gap = (e.total - sp / theta - calf_integral - quarter_norms - kirchhoff_correction).abs();
    Ok(CeramiDiagnostics {
        theta,
        phi: e.total,
        self_pairing: sp,
        calf_integral,
        quarter_norms,
        kirchhoff_correction,
        gap,
    })
}

/// Directional derivative of the residual. Falls back to finite-difference
/// second partials when the nonlinearity has no analytic Hessian.
pub fn jacobian_apply(g: &WeightedGraph, model: &Model, state: &StatePair, direction: &StatePair) -> Result<StatePair> {
    jacobian_apply_with(g, model, state, direction, true)
}

/// As [`jacobian_apply`]; with `allow_fd = false` a missing Hessian is an error.
pub fn jacobian_apply_with(
    g: &WeightedGraph,
    model: &Model,
    state: &StatePair,
    direction: &StatePair,
    allow_fd: bool,
) -> Result<StatePair> {
    check(g, model, &[state, direction])?;
    let (j1, j2) = jacobian_apply_raw(
        g,
        model,
        state.u.values(),
        state.v.values(),
        direction.u.values(),
        direction.v.values(),
        allow_fd,
    )?;
    Ok(StatePair { u: VertexFunction::from_raw(g.tag(), j1), v: VertexFunction::from_raw(g.tag(), j2) })
}

/// Product-space inner product `(u₁,w₁)_{E₁} + (v₁,w₂)_{E₂}`.
pub fn e_inner_pair(g: &WeightedGraph, model: &Model, x: &StatePair, y: &StatePair) -> Result<f64> {
    check(g, model, &[x, y])?;
    let a = model.a();
    Ok(crate::calculus::e_inner_raw(g, a[0], model.potential(0).values(), x.u.values(), y.u.values())
        + crate::calculus::e_inner_raw(g, a[1], model.potential(1).values(), x.v.values(), y.v.values()))
}

/// Hilbert norm `√(‖u‖²_{E₁} + ‖v‖²_{E₂})`.
pub fn e_norm(g: &WeightedGraph, model: &Model, state: &StatePair) -> Result<f64> {
    Ok(e_inner_pair(g, model, state, state)?.max(0.0).sqrt())
}

/// The equivalent sum norm `‖u‖_{E₁} + ‖v‖_{E₂}`.
pub fn e_norm_sum(g: &WeightedGraph, model: &Model, state: &StatePair) -> Result<f64> {
    check(g, model, &[state])?;
    let a = model.a();
    let nu = crate::calculus::e_inner_raw(g, a[0], model.potential(0).values(), state.u.values(), state.u.values());
    let nv = crate::calculus::e_inner_raw(g, a[1], model.potential(1).values(), state.v.values(), state.v.values());
    Ok(nu.max(0.0).sqrt() + nv.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind, Profile};
    use crate::model::{ClosureNonlinearity, PowerLaw};
    use alloc::sync::Arc;

    fn path(n: usize) -> WeightedGraph {
        generate(GraphKind::Path(n), Profile::default(), Profile::default()).unwrap()
    }

    fn zero_f() -> Arc<dyn crate::model::Nonlinearity> {
        Arc::new(ClosureNonlinearity::new("zero", |_, _, _| 0.0, |_, _, _| [0.0, 0.0]).with_hessian(|_, _, _| [0.0; 3]))
    }

    #[test]
    fn path2_energy_examples() {
        let g = path(2);
        let m = Model::uniform(&g, 1.0, [0.0, 0.0], 1.0, zero_f()).unwrap();
        let s = StatePair::from_vecs(&g, vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        assert!((phi(&g, &m, &s).unwrap().total - 2.0).abs() < 1e-14);
        assert!((self_pairing(&g, &m, &s).unwrap() - 4.0).abs() < 1e-14);
        let m4 = Model::uniform(&g, 1.0, [4.0, 0.0], 1.0, zero_f()).unwrap();
        assert!((phi(&g, &m4, &s).unwrap().total - 3.0).abs() < 1e-14);
        assert_eq!(phi(&g, &m, &StatePair::zeros(&g)).unwrap().total, 0.0);
    }

    #[test]
    fn single_vertex_cubic_residual() {
        let g = path(1);
        let f = PowerLaw::symmetric(4.0, 4.0, 4.0).unwrap();
        let m = Model::uniform(&g, 1.0, [0.0, 0.0], 1.0, Arc::new(f)).unwrap();
        for u in [0.3, 1.0, -2.0] {
            let s = StatePair::from_vecs(&g, vec![u], vec![0.0]).unwrap();
            let r = residual(&g, &m, &s).unwrap();
            assert!((r.u.values()[0] - (u - u * u * u)).abs() < 1e-12);
        }
    }

    #[test]
    fn missing_hessian_without_fallback() {
        let g = path(2);
        let f = ClosureNonlinearity::new("q", |_, s, t| s * s * t * t, |_, s, t| [2.0 * s * t * t, 2.0 * s * s * t]);
        let m = Model::uniform(&g, 1.0, [0.0, 0.0], 1.0, Arc::new(f)).unwrap();
        let s = StatePair::from_vecs(&g, vec![1.0, 0.5], vec![0.2, -0.1]).unwrap();
        let err = jacobian_apply_with(&g, &m, &s, &s, false).unwrap_err();
        assert_eq!(err, Error::MissingSecondPartials);
        assert!(jacobian_apply(&g, &m, &s, &s).is_ok());
    }
}
