//! Discrete calculus on a [`WeightedGraph`].
//!
//! ```text
//! Δu(x)     = (1/μ(x)) Σ_{y∼x} w_xy (u(y) − u(x))
//! Δ²u(x)    = Δ(Δu)(x)
//! Γ(u,v)(x) = (1/(2μ(x))) Σ_{y∼x} w_xy (u(y) − u(x)) (v(y) − v(x))
//! ∫ f dμ    = Σ_x f(x) μ(x)
//! ```
//!
//! On a graph with a [`DirichletLayer`](crate::graph::DirichletLayer) every
//! sum over `y∼x` also runs over ghost neighbours, where `u(y) = 0`. Integrals
//! of `|Δu|²` and `Γ` then include the ghost layer (Δu does not vanish there),
//! so Green's identity and `∫(Δ²u)φ = ∫ΔuΔφ` hold for functions supported on
//! the vertex set.
//!
//! The `*_raw` functions work on plain slices in canonical vertex order and do
//! no checking; the public wrappers validate graph binding.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::{symmetric_eigen, CsrMatrix, DenseMatrix};

/// A real value per vertex, bound to one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction {
    values: Vec<f64>,
    graph_tag: u64,
}

impl VertexFunction {
    pub fn new(g: &WeightedGraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != g.len() {
            return Err(Error::LengthMismatch { expected: g.len(), got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { values, graph_tag: g.tag() })
    }

    pub fn zeros(g: &WeightedGraph) -> Self {
        Self { values: vec![0.0; g.len()], graph_tag: g.tag() }
    }

    pub fn constant(g: &WeightedGraph, c: f64) -> Result<Self> {
        Self::new(g, vec![c; g.len()])
    }

    pub fn from_fn(g: &WeightedGraph, f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::new(g, (0..g.len()).map(f).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn graph_tag(&self) -> u64 {
        self.graph_tag
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn check(&self, g: &WeightedGraph) -> Result<()> {
        if self.graph_tag == g.tag() {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }

    /// Binds `values` to a graph tag without checking them.
    pub(crate) fn from_raw(graph_tag: u64, values: Vec<f64>) -> Self {
        Self { values, graph_tag }
    }

    fn with_values(&self, values: Vec<f64>) -> Self {
        Self { values, graph_tag: self.graph_tag }
    }
}

pub(crate) fn laplacian_raw(g: &WeightedGraph, u: &[f64], out: &mut [f64]) {
    let leak = g.boundary().map(|b| b.leak());
    for x in 0..g.len() {
        let mut s: f64 = g.neighbors(x).iter().map(|&(y, w)| w * (u[y] - u[x])).sum();
        if let Some(leak) = leak {
            s -= leak[x] * u[x];
        }
        out[x] = s / g.measure()[x];
    }
}

/// Δu on the first ghost layer (empty without a Dirichlet layer).
pub(crate) fn ghost_laplacian_raw(g: &WeightedGraph, u: &[f64]) -> Vec<f64> {
    match g.boundary() {
        None => Vec::new(),
        Some(b) => b
            .links
            .iter()
            .zip(&b.measure)
            .map(|(links, mu)| links.iter().map(|&(x, w)| w * u[x]).sum::<f64>() / mu)
            .collect(),
    }
}

/// Δ²u given `lu = Δu` on the vertex set and `ghost_lu = Δu` on the ghost layer.
pub(crate) fn biharmonic_from_laplacian(g: &WeightedGraph, lu: &[f64], ghost_lu: &[f64], out: &mut [f64]) {
    laplacian_raw(g, lu, out);
    if let Some(b) = g.boundary() {
        for x in 0..g.len() {
            let s: f64 = b.vertex_links[x].iter().map(|&(k, w)| w * ghost_lu[k]).sum();
            out[x] += s / g.measure()[x];
        }
    }
}

pub(crate) fn biharmonic_raw(g: &WeightedGraph, u: &[f64], out: &mut [f64]) {
    let mut lu = vec![0.0; g.len()];
    laplacian_raw(g, u, &mut lu);
    let ghost = ghost_laplacian_raw(g, u);
    biharmonic_from_laplacian(g, &lu, &ghost, out);
}

/// `∫ Γ(u, v) dμ`, summed edge-wise.
pub(crate) fn gamma_integral_raw(g: &WeightedGraph, u: &[f64], v: &[f64]) -> f64 {
    let mut s: f64 = g.edges().iter().map(|e| e.weight * (u[e.b] - u[e.a]) * (v[e.b] - v[e.a])).sum();
    if let Some(b) = g.boundary() {
        s += b.leak().iter().zip(u.iter().zip(v)).map(|(l, (a, c))| l * a * c).sum::<f64>();
    }
    s
}

pub(crate) fn dirichlet_raw(g: &WeightedGraph, u: &[f64]) -> f64 {
    gamma_integral_raw(g, u, u)
}

/// `∫ Δu Δv dμ` including the ghost layer.
pub(crate) fn laplacian_pairing_raw(g: &WeightedGraph, lu: &[f64], glu: &[f64], lv: &[f64], glv: &[f64]) -> f64 {
    let mut s: f64 = g.measure().iter().zip(lu.iter().zip(lv)).map(|(m, (a, b))| m * a * b).sum();
    if let Some(b) = g.boundary() {
        s += b.measure.iter().zip(glu.iter().zip(glv)).map(|(m, (a, c))| m * a * c).sum::<f64>();
    }
    s
}

pub(crate) fn integral_raw(g: &WeightedGraph, f: &[f64]) -> f64 {
    g.measure().iter().zip(f).map(|(m, f)| m * f).sum()
}

pub(crate) fn e_inner_raw(g: &WeightedGraph, a: f64, vpot: &[f64], u: &[f64], w: &[f64]) -> f64 {
    let n = g.len();
    let (mut lu, mut lw) = (vec![0.0; n], vec![0.0; n]);
    laplacian_raw(g, u, &mut lu);
    laplacian_raw(g, w, &mut lw);
    let (gu, gw) = (ghost_laplacian_raw(g, u), ghost_laplacian_raw(g, w));
    let potential: f64 = (0..n).map(|x| g.measure()[x] * vpot[x] * u[x] * w[x]).sum();
    laplacian_pairing_raw(g, &lu, &gu, &lw, &gw) + a * gamma_integral_raw(g, u, w) + potential
}

pub fn laplacian(g: &WeightedGraph, u: &VertexFunction) -> Result<VertexFunction> {
    u.check(g)?;
    let mut out = vec![0.0; g.len()];
    laplacian_raw(g, u.values(), &mut out);
    Ok(u.with_values(out))
}

pub fn biharmonic(g: &WeightedGraph, u: &VertexFunction) -> Result<VertexFunction> {
    u.check(g)?;
    let mut out = vec![0.0; g.len()];
    biharmonic_raw(g, u.values(), &mut out);
    Ok(u.with_values(out))
}

/// Pointwise Γ(u, v) on the vertex set. On a graph with a Dirichlet layer the
/// ghost vertices carry the other half of each boundary edge, so
/// `integral(gamma_field(u, u))` is then smaller than [`dirichlet_energy`].
pub fn gamma_field(g: &WeightedGraph, u: &VertexFunction, v: &VertexFunction) -> Result<VertexFunction> {
    u.check(g)?;
    v.check(g)?;
    let (u, vv) = (u.values(), v.values());
    let leak = g.boundary().map(|b| b.leak());
    let out = (0..g.len())
        .map(|x| {
            let mut s: f64 = g.neighbors(x).iter().map(|&(y, w)| w * (u[y] - u[x]) * (vv[y] - vv[x])).sum();
            if let Some(leak) = leak {
                s += leak[x] * u[x] * vv[x];
            }
            s / (2.0 * g.measure()[x])
        })
        .collect();
    Ok(v.with_values(out))
}

pub fn integral(g: &WeightedGraph, f: &VertexFunction) -> Result<f64> {
    f.check(g)?;
    Ok(integral_raw(g, f.values()))
}

/// `∫ |∇u|² dμ = Σ_edges w_xy (u(y) − u(x))²` (plus `w u(x)²` per ghost edge).
pub fn dirichlet_energy(g: &WeightedGraph, u: &VertexFunction) -> Result<f64> {
    u.check(g)?;
    Ok(dirichlet_raw(g, u.values()))
}

/// `‖u‖_r`; pass `f64::INFINITY` for the sup norm. Exponents below 2 are rejected.
pub fn norm_lr(g: &WeightedGraph, u: &VertexFunction, r: f64) -> Result<f64> {
    u.check(g)?;
    norm_lr_raw(g, u.values(), r)
}

pub(crate) fn norm_lr_raw(g: &WeightedGraph, u: &[f64], r: f64) -> Result<f64> {
    if r.is_nan() || r < 2.0 {
        return Err(Error::BadExponent(r));
    }
    if r == f64::INFINITY {
        return Ok(u.iter().fold(0.0, |m, x| m.max(x.abs())));
    }
    let s: f64 = g.measure().iter().zip(u).map(|(m, x)| m * x.abs().powf(r)).sum();
    Ok(s.powf(1.0 / r))
}

pub(crate) fn check_potential(g: &WeightedGraph, vpot: &VertexFunction) -> Result<()> {
    vpot.check(g)?;
    match vpot.values().iter().position(|&v| !(v > 0.0)) {
        Some(i) => Err(Error::NonPositivePotential(i)),
        None => Ok(()),
    }
}

/// `(u, w)_E = ∫ ΔuΔw dμ + a ∫ Γ(u, w) dμ + ∫ V u w dμ`.
pub fn e_inner(
    g: &WeightedGraph,
    a: f64,
    vpot: &VertexFunction,
    u: &VertexFunction,
    w: &VertexFunction,
) -> Result<f64> {
    check_potential(g, vpot)?;
    u.check(g)?;
    w.check(g)?;
    Ok(e_inner_raw(g, a, vpot.values(), u.values(), w.values()))
}

/// Sparse realizations of the operators, indexed in canonical vertex order.
#[derive(Debug, Clone)]
pub struct AssembledOperators {
    /// `u ↦ Δu`.
    pub laplacian: CsrMatrix,
    /// `u ↦ Δ²u`.
    pub biharmonic: CsrMatrix,
    /// `D` with `uᵀ D u = ∫ |∇u|² dμ`.
    pub dirichlet: CsrMatrix,
    /// μ(x).
    pub mass: Vec<f64>,
}

pub fn assemble(g: &WeightedGraph) -> AssembledOperators {
    let n = g.len();
    let mu = g.measure();
    let mut lap = Vec::new();
    let mut dir = Vec::new();
    for e in g.edges() {
        let (a, b, w) = (e.a, e.b, e.weight);
        lap.extend([(a, b, w / mu[a]), (a, a, -w / mu[a]), (b, a, w / mu[b]), (b, b, -w / mu[b])]);
        dir.extend([(a, a, w), (b, b, w), (a, b, -w), (b, a, -w)]);
    }
    // Cross term Σ_ghost w_xg Δu(g) / μ(x), with Δu(g) = Σ_z w_gz u(z) / μ(g).
    let mut cross = Vec::new();
    if let Some(layer) = g.boundary() {
        for x in 0..n {
            let l = layer.leak()[x];
            if l != 0.0 {
                lap.push((x, x, -l / mu[x]));
                dir.push((x, x, l));
            }
            for &(k, wxg) in &layer.vertex_links[x] {
                for &(z, wgz) in &layer.links[k] {
                    cross.push((x, z, wxg * wgz / (layer.measure[k] * mu[x])));
                }
            }
        }
    }
    let laplacian = CsrMatrix::from_triplets(n, n, &lap);
    let mut bih = laplacian.mul(&laplacian).triplets();
    bih.extend(cross);
    AssembledOperators {
        biharmonic: CsrMatrix::from_triplets(n, n, &bih),
        laplacian,
        dirichlet: CsrMatrix::from_triplets(n, n, &dir),
        mass: mu.to_vec(),
    }
}

impl AssembledOperators {
    /// Dense Euclidean Gram matrix `K` of the `E` inner product:
    /// `uᵀ K w = (u, w)_E`, i.e. `K = M (Δ² − aΔ + V)`.
    pub fn e_gram(&self, a: f64, vpot: &[f64]) -> DenseMatrix {
        let n = self.mass.len();
        let mut k = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for (j, v) in self.biharmonic.row(i) {
                k[(i, j)] += self.mass[i] * v;
            }
            for (j, v) in self.laplacian.row(i) {
                k[(i, j)] -= a * self.mass[i] * v;
            }
            k[(i, i)] += self.mass[i] * vpot[i];
        }
        // Symmetrize away round-off.
        for i in 0..n {
            for j in i + 1..n {
                let s = 0.5 * (k[(i, j)] + k[(j, i)]);
                k[(i, j)] = s;
                k[(j, i)] = s;
            }
        }
        k
    }
}

/// Ascending eigenvalues of the pencil `(K, M)` where `K` is the `E` Gram
/// matrix and `M = diag(μ)`.
pub fn e_spectrum(g: &WeightedGraph, a: f64, vpot: &VertexFunction) -> Result<Vec<f64>> {
    check_potential(g, vpot)?;
    let ops = assemble(g);
    let k = ops.e_gram(a, vpot.values());
    let n = g.len();
    let mut c = DenseMatrix::zeros(n, n);
    let s: Vec<f64> = ops.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    for i in 0..n {
        for j in 0..n {
            c[(i, j)] = s[i] * k[(i, j)] * s[j];
        }
    }
    let (values, _) = symmetric_eigen(&c)?;
    if values[0] <= 0.0 {
        return Err(Error::EigenSolverFailure("E Gram matrix is not positive definite".into()));
    }
    Ok(values)
}

/// Best constant `sup ‖u‖₂ / ‖u‖_E = 1/√λ_min(K, M)`.
pub fn sharp_embedding_2(g: &WeightedGraph, a: f64, vpot: &VertexFunction) -> Result<f64> {
    Ok(1.0 / e_spectrum(g, a, vpot)?[0].sqrt())
}

/// Best constants on the `E`-orthogonal complements of the first `k`
/// eigenvectors, `k = 0..n`: `1/√λ_{k+1}`. The sequence is non-increasing.
pub fn subspace_embedding_ratios(g: &WeightedGraph, a: f64, vpot: &VertexFunction) -> Result<Vec<f64>> {
    Ok(e_spectrum(g, a, vpot)?.iter().map(|l| 1.0 / l.sqrt()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind, Profile};

    fn path(n: usize) -> WeightedGraph {
        generate(GraphKind::Path(n), Profile::default(), Profile::default()).unwrap()
    }

    fn f(g: &WeightedGraph, v: &[f64]) -> VertexFunction {
        VertexFunction::new(g, v.to_vec()).unwrap()
    }

    #[test]
    fn laplacian_examples() {
        let g3 = path(3);
        assert_eq!(laplacian(&g3, &f(&g3, &[0.0, 1.0, 0.0])).unwrap().values(), [1.0, -2.0, 1.0]);
        assert_eq!(laplacian(&g3, &f(&g3, &[2.5; 3])).unwrap().values(), [0.0; 3]);
        let g2 = path(2);
        assert_eq!(laplacian(&g2, &f(&g2, &[1.0, 0.0])).unwrap().values(), [-1.0, 1.0]);
    }

    #[test]
    fn biharmonic_examples() {
        let g2 = path(2);
        assert_eq!(biharmonic(&g2, &f(&g2, &[1.0, 0.0])).unwrap().values(), [2.0, -2.0]);
        let g3 = path(3);
        assert_eq!(biharmonic(&g3, &f(&g3, &[0.0, 1.0, 0.0])).unwrap().values(), [-3.0, 6.0, -3.0]);
        assert_eq!(biharmonic(&g3, &f(&g3, &[-1.0; 3])).unwrap().values(), [0.0; 3]);
    }

    #[test]
    fn gamma_integral_and_norm_examples() {
        let g2 = path(2);
        let u = f(&g2, &[1.0, 0.0]);
        assert_eq!(gamma_field(&g2, &u, &u).unwrap().values(), [0.5, 0.5]);
        assert_eq!(dirichlet_energy(&g2, &u).unwrap(), 1.0);
        let g3 = path(3);
        assert_eq!(dirichlet_energy(&g3, &f(&g3, &[0.0, 1.0, 0.0])).unwrap(), 2.0);

        let g = WeightedGraph::build(&["a", "b"], &[("a", "b", 1.0)], &[2.0, 3.0]).unwrap();
        assert_eq!(integral(&g, &f(&g, &[1.0, -1.0])).unwrap(), -1.0);
        assert_eq!(integral(&g3, &f(&g3, &[1.0; 3])).unwrap(), 3.0);

        let v = f(&g2, &[3.0, 4.0]);
        assert!((norm_lr(&g2, &v, 2.0).unwrap() - 5.0).abs() < 1e-15);
        assert_eq!(norm_lr(&g2, &v, f64::INFINITY).unwrap(), 4.0);
        assert_eq!(norm_lr(&g2, &v, 1.5).unwrap_err().reason(), "BadExponent");
        assert_eq!(norm_lr(&g2, &VertexFunction::zeros(&g2), 3.0).unwrap(), 0.0);
    }

    #[test]
    fn e_norm_example() {
        let g2 = path(2);
        let one = VertexFunction::constant(&g2, 1.0).unwrap();
        let u = f(&g2, &[1.0, 0.0]);
        assert!((e_inner(&g2, 1.0, &one, &u, &u).unwrap() - 4.0).abs() < 1e-14);
        let bad = f(&g2, &[1.0, 0.0]);
        assert_eq!(e_inner(&g2, 1.0, &bad, &u, &u).unwrap_err().reason(), "NonPositivePotential");
    }

    #[test]
    fn mismatched_graph_is_rejected() {
        let (g, h) = (path(2), path(2));
        let u = VertexFunction::zeros(&h);
        assert_eq!(laplacian(&g, &u).unwrap_err(), Error::GraphMismatch);
        assert!(VertexFunction::new(&g, vec![f64::NAN, 0.0]).is_err());
        assert!(VertexFunction::new(&g, vec![0.0]).is_err());
    }

    #[test]
    fn assembled_path2() {
        let ops = assemble(&path(2));
        let l = ops.laplacian.to_dense();
        assert_eq!([l[(0, 0)], l[(0, 1)], l[(1, 0)], l[(1, 1)]], [-1.0, 1.0, 1.0, -1.0]);
        assert_eq!(ops.dirichlet.row_sums(), [0.0, 0.0]);
        let ops3 = assemble(&path(3));
        assert_eq!(ops3.biharmonic, ops3.laplacian.mul(&ops3.laplacian));
    }

    #[test]
    fn sharp_embedding_examples() {
        let single = WeightedGraph::build::<&str>(&["o"], &[], &[1.0]).unwrap();
        let one = VertexFunction::constant(&single, 1.0).unwrap();
        assert!((sharp_embedding_2(&single, 1.0, &one).unwrap() - 1.0).abs() < 1e-14);
        let g2 = path(2);
        let one = VertexFunction::constant(&g2, 1.0).unwrap();
        let c = sharp_embedding_2(&g2, 1.0, &one).unwrap();
        // Eigenvalues of Δ² − Δ + 1 on path(2) are 1 and 4 + 2 + 1 = 7.
        assert!((c - 1.0).abs() < 1e-12);
        let ratios = subspace_embedding_ratios(&g2, 1.0, &one).unwrap();
        assert!((ratios[1] - 1.0 / 7f64.sqrt()).abs() < 1e-12);
    }
}
