#![allow(dead_code)]

use std::sync::Arc;

use graphpass_core::graph::{generate, GraphKind, Profile};
use graphpass_core::model::{PowerLaw, SexticPolynomial};
use graphpass_core::{Model, StatePair, VertexFunction, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn path(n: usize) -> WeightedGraph {
    generate(GraphKind::Path(n), Profile::default(), Profile::default()).unwrap()
}

/// Connected graph: a random tree plus a few chords, weights and measures in [0.1, 10].
pub fn random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> WeightedGraph {
    let n = rng.random_range(1..=max_n);
    let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        edges.push((ids[j].clone(), ids[i].clone(), rng.random_range(0.1..10.0)));
    }
    for _ in 0..n / 2 {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        let dup = edges.iter().any(|(a, b, _)| (a == &ids[i] && b == &ids[j]) || (a == &ids[j] && b == &ids[i]));
        if i != j && !dup {
            edges.push((ids[i].clone(), ids[j].clone(), rng.random_range(0.1..10.0)));
        }
    }
    let mu: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..10.0)).collect();
    WeightedGraph::build(&ids, &edges, &mu).unwrap()
}

pub fn random_function(g: &WeightedGraph, rng: &mut ChaCha8Rng, scale: f64) -> VertexFunction {
    VertexFunction::from_fn(g, |_| rng.random_range(-scale..scale)).unwrap()
}

pub fn random_state(g: &WeightedGraph, rng: &mut ChaCha8Rng, scale: f64) -> StatePair {
    let u = random_function(g, rng, scale);
    let v = random_function(g, rng, scale);
    StatePair::new(g, u, v).unwrap()
}

pub fn sextic_model(g: &WeightedGraph, b: [f64; 2]) -> Model {
    let n = g.len();
    let f = SexticPolynomial::new(vec![0.5; n], vec![0.5; n]).unwrap();
    Model::uniform(g, 1.0, b, 1.0, Arc::new(f)).unwrap()
}

/// Random coefficients, potentials and sextic coefficient functions.
pub fn random_sextic_model(g: &WeightedGraph, rng: &mut ChaCha8Rng, b: [f64; 2]) -> Model {
    let n = g.len();
    let a1: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
    let a2: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.95)).collect();
    let f = SexticPolynomial::new(a1, a2).unwrap();
    let v1 = VertexFunction::from_fn(g, |_| rng.random_range(0.5..3.0)).unwrap();
    let v2 = VertexFunction::from_fn(g, |_| rng.random_range(0.5..3.0)).unwrap();
    let a = [rng.random_range(0.2..3.0), rng.random_range(0.2..3.0)];
    Model::new(g, a, b, [v1, v2], Arc::new(f)).unwrap()
}

/// One vertex, `F = (s⁴ + t⁴)/4`, so each component sees `u − u³`.
pub fn quartic_single() -> (WeightedGraph, Model) {
    let g = path(1);
    let f = PowerLaw::symmetric(4.0, 4.0, 4.0).unwrap();
    let m = Model::uniform(&g, 1.0, [0.0, 0.0], 1.0, Arc::new(f)).unwrap();
    (g, m)
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}
