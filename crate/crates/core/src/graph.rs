//! Finite weighted graphs, generators and ball truncation.
//!
//! A [`WeightedGraph`] fixes a canonical vertex order at construction; every
//! vector and matrix in the crate is indexed by that order. A graph may carry
//! a [`DirichletLayer`]: ghost vertices just outside the vertex set on which
//! every function is pinned to zero. [`truncate_ball`] produces such graphs
//! from implicit infinite families such as the integer lattice.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

static NEXT_TAG: AtomicU64 = AtomicU64::new(1);

fn fresh_tag() -> u64 {
    NEXT_TAG.fetch_add(1, Ordering::Relaxed)
}

/// An undirected edge stored once, with `a < b` in canonical order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// Zero-extension ghost vertices adjacent to the vertex set.
///
/// Only the first ghost layer enters any formula: Δu at a ghost `y` is
/// `(1/μ(y)) Σ w_xy u(x)` over its non-ghost neighbours, and the edges to
/// ghosts add `w_xy (0 − u(x))` terms to Δu and to the Dirichlet form.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletLayer {
    pub(crate) labels: Vec<String>,
    pub(crate) measure: Vec<f64>,
    /// For each ghost: (vertex index, weight) of its links into the graph.
    pub(crate) links: Vec<Vec<(usize, f64)>>,
    /// For each vertex: (ghost index, weight).
    pub(crate) vertex_links: Vec<Vec<(usize, f64)>>,
    /// For each vertex: total weight of edges into the ghost layer.
    pub(crate) leak: Vec<f64>,
}

impl DirichletLayer {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    /// Total ghost-edge weight at each vertex.
    pub fn leak(&self) -> &[f64] {
        &self.leak
    }
}

#[derive(Debug, Clone)]
pub struct WeightedGraph {
    tag: u64,
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    measure: Vec<f64>,
    mu_min: f64,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
    boundary: Option<DirichletLayer>,
}

impl PartialEq for WeightedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
            && self.measure == other.measure
            && self.edges == other.edges
            && self.boundary == other.boundary
    }
}

fn check_positive(what: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveWeightOrMeasure(format!("{what} = {value}")))
    }
}

impl WeightedGraph {
    /// Validates and builds a graph.
    ///
    /// `measure[i]` belongs to `vertex_ids[i]`. An edge listed twice must carry
    /// the same weight both times.
    pub fn build<S: AsRef<str>>(vertex_ids: &[S], weighted_edges: &[(S, S, f64)], measure: &[f64]) -> Result<Self> {
        if vertex_ids.is_empty() {
            return Err(Error::BadParams("empty vertex list".to_string()));
        }
        if measure.len() != vertex_ids.len() {
            return Err(Error::LengthMismatch { expected: vertex_ids.len(), got: measure.len() });
        }
        let mut index = BTreeMap::new();
        let mut labels = Vec::with_capacity(vertex_ids.len());
        for (i, id) in vertex_ids.iter().enumerate() {
            let id = id.as_ref();
            if id.is_empty() || id.chars().any(char::is_whitespace) {
                return Err(Error::BadParams(format!("invalid vertex id {id:?}")));
            }
            if index.insert(id.to_string(), i).is_some() {
                return Err(Error::DuplicateVertex(id.to_string()));
            }
            labels.push(id.to_string());
        }
        for (id, &m) in labels.iter().zip(measure) {
            check_positive(&format!("mu({id})"), m)?;
        }
        let mut weights: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (x, y, w) in weighted_edges {
            let (x, y) = (x.as_ref(), y.as_ref());
            let i = *index.get(x).ok_or_else(|| Error::UnknownVertex(x.to_string()))?;
            let j = *index.get(y).ok_or_else(|| Error::UnknownVertex(y.to_string()))?;
            if i == j {
                return Err(Error::SelfLoop(x.to_string()));
            }
            check_positive(&format!("w({x},{y})"), *w)?;
            let key = (i.min(j), i.max(j));
            match weights.get(&key) {
                Some(&old) if old != *w => return Err(Error::NonSymmetricWeight(x.to_string(), y.to_string())),
                _ => {
                    weights.insert(key, *w);
                }
            }
        }
        let edges: Vec<Edge> = weights.into_iter().map(|((a, b), weight)| Edge { a, b, weight }).collect();
        Self::from_parts(labels, index, measure.to_vec(), edges, None)
    }

    fn from_parts(
        labels: Vec<String>,
        index: BTreeMap<String, usize>,
        measure: Vec<f64>,
        edges: Vec<Edge>,
        boundary: Option<DirichletLayer>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            adjacency[e.a].push((e.b, e.weight));
            adjacency[e.b].push((e.a, e.weight));
        }
        let components = count_components(&adjacency);
        if components != 1 {
            return Err(Error::DisconnectedGraph(components));
        }
        let mu_min = measure.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self { tag: fresh_tag(), labels, index, measure, mu_min, edges, adjacency, boundary })
    }

    /// Identifier that binds [`VertexFunction`](crate::VertexFunction)s to this graph.
    pub fn tag(&self) -> u64 {
        self.tag
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn mu_min(&self) -> f64 {
        self.mu_min
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn boundary(&self) -> Option<&DirichletLayer> {
        self.boundary.as_ref()
    }

    /// Hop distance by breadth-first search.
    pub fn distance(&self, x: &str, y: &str) -> Result<usize> {
        let (i, j) = (self.index_of(x)?, self.index_of(y)?);
        Ok(self.distances_from(i)[j])
    }

    /// Hop distances from vertex index `source` to every vertex.
    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adjacency[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Rebuilds the graph from its own parts through [`WeightedGraph::build`].
    pub fn revalidate(&self) -> Result<Self> {
        let edges: Vec<(&str, &str, f64)> =
            self.edges.iter().map(|e| (self.labels[e.a].as_str(), self.labels[e.b].as_str(), e.weight)).collect();
        let ids: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        let mut g = Self::build(&ids, &edges, &self.measure)?;
        g.boundary = self.boundary.clone();
        Ok(g)
    }
}

fn count_components(adjacency: &[Vec<(usize, f64)>]) -> usize {
    let n = adjacency.len();
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(x) = stack.pop() {
            for &(y, _) in &adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    components
}

/// How edge weights or vertex measures are filled in by [`generate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Constant(f64),
    /// Independent uniform draws from `[lo, hi]`.
    Uniform {
        lo: f64,
        hi: f64,
        seed: u64,
    },
}

impl Default for Profile {
    fn default() -> Self {
        Profile::Constant(1.0)
    }
}

impl Profile {
    fn fill(&self, count: usize, stream: u64) -> Result<Vec<f64>> {
        match *self {
            Profile::Constant(c) => {
                check_positive("profile constant", c)?;
                Ok(vec![c; count])
            }
            Profile::Uniform { lo, hi, seed } => {
                check_positive("profile lower bound", lo)?;
                if !(hi >= lo && hi.is_finite()) {
                    return Err(Error::BadParams(format!("profile range [{lo}, {hi}]")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(stream);
                Ok((0..count).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphKind {
    Path(usize),
    /// `n` leaves around one center.
    Star(usize),
    /// ℓ¹ ball of radius `radius` in ℤ^`dim`, centered at the origin.
    LatticeBall {
        dim: usize,
        radius: i64,
    },
    /// Uniform random recursive tree.
    RandomTree {
        n: usize,
        seed: u64,
    },
}

/// Builds one of the canonical test graphs.
pub fn generate(kind: GraphKind, weights: Profile, measure: Profile) -> Result<WeightedGraph> {
    let (labels, pairs): (Vec<String>, Vec<(usize, usize)>) = match kind {
        GraphKind::Path(n) => {
            if n < 1 {
                return Err(Error::BadParams("path needs n >= 1".to_string()));
            }
            ((1..=n).map(|i| format!("x{i}")).collect(), (1..n).map(|i| (i - 1, i)).collect())
        }
        GraphKind::Star(n) => {
            if n < 1 {
                return Err(Error::BadParams("star needs n >= 1".to_string()));
            }
            let mut labels = vec!["c".to_string()];
            labels.extend((1..=n).map(|i| format!("l{i}")));
            (labels, (1..=n).map(|i| (0, i)).collect())
        }
        GraphKind::LatticeBall { dim, radius } => {
            let family = IntegerLattice::new(dim)?;
            if radius < 0 {
                return Err(Error::BadParams("lattice radius must be >= 0".to_string()));
            }
            let layers = bfs_layers(&family, &family.origin(), radius as usize);
            let points: Vec<Vec<i64>> = layers.into_iter().flatten().collect();
            let lookup: BTreeMap<&Vec<i64>, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
            let mut pairs = Vec::new();
            for (i, p) in points.iter().enumerate() {
                for (q, _) in family.neighbors(p) {
                    if let Some(&j) = lookup.get(&q) {
                        if i < j {
                            pairs.push((i, j));
                        }
                    }
                }
            }
            (points.iter().map(|p| family.label(p)).collect(), pairs)
        }
        GraphKind::RandomTree { n, seed } => {
            if n < 1 {
                return Err(Error::BadParams("random tree needs n >= 1".to_string()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pairs = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
            ((0..n).map(|i| format!("t{i}")).collect(), pairs)
        }
    };
    let w = weights.fill(pairs.len(), 1)?;
    let mu = measure.fill(labels.len(), 2)?;
    let edges: Vec<(&str, &str, f64)> =
        pairs.iter().zip(&w).map(|(&(i, j), &w)| (labels[i].as_str(), labels[j].as_str(), w)).collect();
    let ids: Vec<&str> = labels.iter().map(String::as_str).collect();
    WeightedGraph::build(&ids, &edges, &mu)
}

/// An implicit, locally finite graph that can list neighbours on demand.
pub trait GraphFamily {
    type Vertex: Ord + Clone;

    fn neighbors(&self, v: &Self::Vertex) -> Vec<(Self::Vertex, f64)>;
    fn measure(&self, v: &Self::Vertex) -> f64;
    fn label(&self, v: &Self::Vertex) -> String;
}

/// ℤ^d with nearest-neighbour edges, `d ∈ {1, 2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegerLattice {
    pub dim: usize,
    pub weight: f64,
    pub mu: f64,
}

impl IntegerLattice {
    pub fn new(dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::BadParams(format!("lattice dimension {dim} not in 1..=3")));
        }
        Ok(Self { dim, weight: 1.0, mu: 1.0 })
    }

    pub fn origin(&self) -> Vec<i64> {
        vec![0; self.dim]
    }
}

impl GraphFamily for IntegerLattice {
    type Vertex = Vec<i64>;

    fn neighbors(&self, v: &Vec<i64>) -> Vec<(Vec<i64>, f64)> {
        let mut out = Vec::with_capacity(2 * self.dim);
        for k in 0..self.dim {
            for step in [-1, 1] {
                let mut q = v.clone();
                q[k] += step;
                out.push((q, self.weight));
            }
        }
        out
    }

    fn measure(&self, _v: &Vec<i64>) -> f64 {
        self.mu
    }

    fn label(&self, v: &Vec<i64>) -> String {
        let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
        parts.join(",")
    }
}

/// Vertices grouped by hop distance from `center`, layers `0..=depth`.
fn bfs_layers<F: GraphFamily>(family: &F, center: &F::Vertex, depth: usize) -> Vec<Vec<F::Vertex>> {
    let mut seen: BTreeMap<F::Vertex, ()> = BTreeMap::new();
    seen.insert(center.clone(), ());
    let mut layers = vec![vec![center.clone()]];
    for _ in 0..depth {
        let mut next = Vec::new();
        for v in layers.last().unwrap() {
            for (q, _) in family.neighbors(v) {
                if !seen.contains_key(&q) {
                    seen.insert(q.clone(), ());
                    next.push(q);
                }
            }
        }
        next.sort();
        layers.push(next);
    }
    layers
}

/// A ghost vertex of a truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct GhostVertex {
    pub label: String,
    /// `R + 1` or `R + 2`.
    pub distance: usize,
    pub measure: f64,
    /// Links to vertices at distance `≤ R + 1`, by label.
    pub links: Vec<(String, f64)>,
}

/// The ball `B_R(x₀)` of an infinite family with two zero-extension layers.
#[derive(Debug, Clone)]
pub struct TruncatedGraph {
    /// Interior graph; its [`DirichletLayer`] is the first ghost layer.
    pub interior: WeightedGraph,
    pub ghosts: Vec<GhostVertex>,
    pub center: String,
    pub radius: usize,
}

/// Cuts the ball of radius `radius` around `center` out of `family`.
pub fn truncate_ball<F: GraphFamily>(family: &F, center: &F::Vertex, radius: usize) -> Result<TruncatedGraph> {
    let layers = bfs_layers(family, center, radius + 2);
    let mut dist: BTreeMap<F::Vertex, usize> = BTreeMap::new();
    for (d, layer) in layers.iter().enumerate() {
        for v in layer {
            dist.insert(v.clone(), d);
        }
    }
    let interior: Vec<F::Vertex> = layers[..=radius].iter().flatten().cloned().collect();
    let interior_index: BTreeMap<F::Vertex, usize> = interior.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();

    let mut labels = Vec::with_capacity(interior.len());
    let mut measure = Vec::with_capacity(interior.len());
    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (i, v) in interior.iter().enumerate() {
        labels.push(family.label(v));
        let mu = family.measure(v);
        check_positive("family measure", mu)?;
        measure.push(mu);
        for (q, w) in family.neighbors(v) {
            check_positive("family weight", w)?;
            if let Some(&j) = interior_index.get(&q) {
                if i < j {
                    edges.insert((i, j), w);
                }
            }
        }
    }

    let mut ghosts = Vec::new();
    let mut layer = DirichletLayer {
        labels: Vec::new(),
        measure: Vec::new(),
        links: Vec::new(),
        vertex_links: vec![Vec::new(); interior.len()],
        leak: vec![0.0; interior.len()],
    };
    for (offset, ghost_layer) in layers[radius + 1..].iter().enumerate() {
        let d = radius + 1 + offset;
        for v in ghost_layer {
            let mu = family.measure(v);
            check_positive("family measure", mu)?;
            let mut links = Vec::new();
            let mut inner = Vec::new();
            for (q, w) in family.neighbors(v) {
                match dist.get(&q) {
                    Some(&dq) if dq <= radius + 1 => {
                        links.push((family.label(&q), w));
                        if let Some(&j) = interior_index.get(&q) {
                            inner.push((j, w));
                        }
                    }
                    _ => {}
                }
            }
            if d == radius + 1 {
                let g = layer.labels.len();
                for &(j, w) in &inner {
                    layer.vertex_links[j].push((g, w));
                    layer.leak[j] += w;
                }
                layer.labels.push(family.label(v));
                layer.measure.push(mu);
                layer.links.push(inner);
            }
            ghosts.push(GhostVertex { label: family.label(v), distance: d, measure: mu, links });
        }
    }

    let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
    let edges = edges.into_iter().map(|((a, b), weight)| Edge { a, b, weight }).collect();
    let interior_graph = WeightedGraph::from_parts(labels, index, measure, edges, Some(layer))?;
    Ok(TruncatedGraph { interior: interior_graph, ghosts, center: family.label(center), radius })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> WeightedGraph {
        generate(GraphKind::Path(n), Profile::default(), Profile::default()).unwrap()
    }

    #[test]
    fn smallest_connected_graph() {
        let g = WeightedGraph::build(&["x1", "x2"], &[("x1", "x2", 1.0)], &[1.0, 1.0]).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.mu_min(), 1.0);
        assert_eq!(g, path(2));
    }

    #[test]
    fn path_is_connected_and_split_graph_is_not() {
        let ok = WeightedGraph::build(&["x1", "x2", "x3"], &[("x1", "x2", 1.0), ("x2", "x3", 1.0)], &[1.0; 3]);
        assert!(ok.is_ok());
        let err = WeightedGraph::build(&["x1", "x2", "x3", "x4"], &[("x1", "x2", 1.0), ("x3", "x4", 1.0)], &[1.0; 4])
            .unwrap_err();
        assert_eq!(err, Error::DisconnectedGraph(2));
    }

    #[test]
    fn rejects_bad_edges_and_measures() {
        let ids = ["a", "b"];
        let e = WeightedGraph::build(&ids, &[("a", "b", 1.0), ("b", "a", 2.0)], &[1.0, 1.0]);
        assert_eq!(e.unwrap_err().reason(), "NonSymmetricWeight");
        // The same weight listed from both ends is one edge.
        let g = WeightedGraph::build(&ids, &[("a", "b", 2.0), ("b", "a", 2.0)], &[1.0, 1.0]).unwrap();
        assert_eq!(g.edges().len(), 1);
        let e = WeightedGraph::build(&ids, &[("a", "b", -1.0)], &[1.0, 1.0]);
        assert_eq!(e.unwrap_err().reason(), "NonPositiveWeightOrMeasure");
        let e = WeightedGraph::build(&ids, &[("a", "b", 1.0)], &[1.0, 0.0]);
        assert_eq!(e.unwrap_err().reason(), "NonPositiveWeightOrMeasure");
        let e = WeightedGraph::build(&ids, &[("a", "a", 1.0)], &[1.0, 1.0]);
        assert_eq!(e.unwrap_err().reason(), "SelfLoop");
        let e = WeightedGraph::build(&["a", "a"], &[("a", "a", 1.0)], &[1.0, 1.0]);
        assert_eq!(e.unwrap_err().reason(), "DuplicateVertex");
        let e = WeightedGraph::build(&ids, &[("a", "z", 1.0)], &[1.0, 1.0]);
        assert_eq!(e.unwrap_err().reason(), "UnknownVertex");
    }

    #[test]
    fn distances() {
        let g = path(3);
        assert_eq!(g.distance("x1", "x3").unwrap(), 2);
        assert_eq!(g.distance("x2", "x2").unwrap(), 0);
        assert!(g.distance("x1", "nope").is_err());
        let ball =
            generate(GraphKind::LatticeBall { dim: 2, radius: 2 }, Profile::default(), Profile::default()).unwrap();
        // Corner-to-corner in the ℓ¹ ball: (2,0) to (-2,0).
        assert_eq!(ball.distance("2,0", "-2,0").unwrap(), 4);
        assert_eq!(ball.distance("0,2", "2,0").unwrap(), 4);
    }

    #[test]
    fn generators() {
        let star = generate(GraphKind::Star(4), Profile::default(), Profile::default()).unwrap();
        assert_eq!(star.len(), 5);
        assert_eq!(star.degree(star.index_of("c").unwrap()), 4);
        let ball =
            generate(GraphKind::LatticeBall { dim: 2, radius: 2 }, Profile::default(), Profile::default()).unwrap();
        assert_eq!(ball.len(), 13);
        assert!(generate(GraphKind::Path(0), Profile::default(), Profile::default()).is_err());
        assert!(generate(GraphKind::LatticeBall { dim: 4, radius: 1 }, Profile::default(), Profile::default()).is_err());
        assert!(
            generate(GraphKind::LatticeBall { dim: 2, radius: -1 }, Profile::default(), Profile::default()).is_err()
        );
        let t1 = generate(GraphKind::RandomTree { n: 12, seed: 3 }, Profile::default(), Profile::default()).unwrap();
        let t2 = generate(GraphKind::RandomTree { n: 12, seed: 3 }, Profile::default(), Profile::default()).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(t1.edges().len(), 11);
    }

    #[test]
    fn truncation_of_the_line() {
        let z = IntegerLattice::new(1).unwrap();
        let t = truncate_ball(&z, &vec![0], 1).unwrap();
        let mut interior: Vec<&str> = t.interior.labels().iter().map(String::as_str).collect();
        interior.sort();
        assert_eq!(interior, ["-1", "0", "1"]);
        let mut ghosts: Vec<&str> = t.ghosts.iter().map(|g| g.label.as_str()).collect();
        ghosts.sort();
        assert_eq!(ghosts, ["-2", "-3", "2", "3"]);
        let layer = t.interior.boundary().unwrap();
        assert_eq!(layer.len(), 2);
        assert_eq!(layer.leak()[t.interior.index_of("1").unwrap()], 1.0);
        assert_eq!(layer.leak()[t.interior.index_of("0").unwrap()], 0.0);

        let t0 = truncate_ball(&z, &vec![0], 0).unwrap();
        assert_eq!(t0.interior.len(), 1);
        assert_eq!(t0.ghosts.iter().filter(|g| g.distance == 1).count(), 2);
        assert_eq!(t0.ghosts.iter().filter(|g| g.distance == 2).count(), 2);
    }
}
