mod common;

use graphpass_core::calculus::{
    assemble, biharmonic, dirichlet_energy, e_inner, gamma_field, integral, laplacian, norm_lr, sharp_embedding_2,
    subspace_embedding_ratios,
};
use graphpass_core::graph::{truncate_ball, IntegerLattice};
use graphpass_core::{VertexFunction, WeightedGraph};
use proptest::prelude::*;

fn vf(g: &WeightedGraph, v: &[f64]) -> VertexFunction {
    VertexFunction::new(g, v.to_vec()).unwrap()
}

/// Laplacian straight from the edge list.
fn laplacian_oracle(g: &WeightedGraph, u: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; g.len()];
    for e in g.edges() {
        out[e.a] += e.weight * (u[e.b] - u[e.a]);
        out[e.b] += e.weight * (u[e.a] - u[e.b]);
    }
    out.iter().zip(g.measure()).map(|(s, m)| s / m).collect()
}

fn close_all(a: &[f64], b: &[f64], rel: f64) -> bool {
    let scale = 1.0 + b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= rel * scale)
}

#[test]
fn laplacian_examples() {
    let p3 = common::path(3);
    assert_eq!(laplacian(&p3, &vf(&p3, &[0.0, 1.0, 0.0])).unwrap().values(), &[1.0, -2.0, 1.0]);
    assert_eq!(laplacian(&p3, &vf(&p3, &[2.5; 3])).unwrap().values(), &[0.0; 3]);
    let p2 = common::path(2);
    assert_eq!(laplacian(&p2, &vf(&p2, &[1.0, 0.0])).unwrap().values(), &[-1.0, 1.0]);
}

#[test]
fn biharmonic_examples() {
    let p2 = common::path(2);
    assert_eq!(biharmonic(&p2, &vf(&p2, &[1.0, 0.0])).unwrap().values(), &[2.0, -2.0]);
    let p3 = common::path(3);
    assert_eq!(biharmonic(&p3, &vf(&p3, &[0.0, 1.0, 0.0])).unwrap().values(), &[-3.0, 6.0, -3.0]);
    assert_eq!(biharmonic(&p3, &vf(&p3, &[-1.0; 3])).unwrap().values(), &[0.0; 3]);
}

#[test]
fn gamma_integral_and_energy_examples() {
    let p2 = common::path(2);
    let u = vf(&p2, &[1.0, 0.0]);
    assert_eq!(gamma_field(&p2, &u, &u).unwrap().values(), &[0.5, 0.5]);
    let c = vf(&p2, &[3.0, 3.0]);
    assert_eq!(gamma_field(&p2, &c, &u).unwrap().values(), &[0.0, 0.0]);
    assert_eq!(dirichlet_energy(&p2, &u).unwrap(), 1.0);
    let p3 = common::path(3);
    assert_eq!(dirichlet_energy(&p3, &vf(&p3, &[0.0, 1.0, 0.0])).unwrap(), 2.0);

    let weighted = WeightedGraph::build(&["x1", "x2"], &[("x1", "x2", 1.0)], &[2.0, 3.0]).unwrap();
    assert_eq!(integral(&weighted, &vf(&weighted, &[1.0, -1.0])).unwrap(), -1.0);
    let p5 = common::path(5);
    assert_eq!(integral(&p5, &vf(&p5, &[1.0; 5])).unwrap(), 5.0);
    assert_eq!(integral(&p5, &VertexFunction::zeros(&p5)).unwrap(), 0.0);
}

#[test]
fn norms() {
    let p2 = common::path(2);
    let u = vf(&p2, &[3.0, 4.0]);
    assert_eq!(norm_lr(&p2, &u, 2.0).unwrap(), 5.0);
    assert_eq!(norm_lr(&p2, &u, f64::INFINITY).unwrap(), 4.0);
    assert_eq!(norm_lr(&p2, &VertexFunction::zeros(&p2), 3.0).unwrap(), 0.0);
    assert_eq!(norm_lr(&p2, &u, 1.5).unwrap_err().reason(), "BadExponent");
    let one = vf(&p2, &[1.0, 1.0]);
    assert_eq!(e_inner(&p2, 1.0, &one, &VertexFunction::zeros(&p2), &u).unwrap(), 0.0);
    assert_eq!(e_inner(&p2, 1.0, &one, &vf(&p2, &[1.0, 0.0]), &vf(&p2, &[1.0, 0.0])).unwrap(), 4.0);
}

#[test]
fn binding_and_finiteness() {
    let p2 = common::path(2);
    let other = common::path(2);
    let u = vf(&other, &[1.0, 0.0]);
    assert_eq!(laplacian(&p2, &u).unwrap_err().reason(), "GraphMismatch");
    assert_eq!(VertexFunction::new(&p2, vec![1.0]).unwrap_err().reason(), "LengthMismatch");
    assert_eq!(VertexFunction::new(&p2, vec![1.0, f64::NAN]).unwrap_err().reason(), "NonFinite");
}

#[test]
fn sharp_constants() {
    let p1 = common::path(1);
    let one = vf(&p1, &[1.0]);
    assert!((sharp_embedding_2(&p1, 1.0, &one).unwrap() - 1.0).abs() < 1e-12);
    let p2 = common::path(2);
    let v = vf(&p2, &[1.0, 1.0]);
    let s = sharp_embedding_2(&p2, 1.0, &v).unwrap();
    assert!(s > 0.0 && s <= 1.0 + 1e-12);
    // Pencil (K, I) on path(2): K has eigenvalues 1 (constants) and 4+2+1 = 7.
    assert!((s - 1.0).abs() < 1e-12);
    let ratios = subspace_embedding_ratios(&p2, 1.0, &v).unwrap();
    assert!((ratios[1] - 1.0 / 7f64.sqrt()).abs() < 1e-12);
    assert!(ratios.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn truncated_line_uses_zero_extension() {
    let z = IntegerLattice::new(1).unwrap();
    let t = truncate_ball(&z, &vec![0], 2).unwrap();
    let big = truncate_ball(&z, &vec![0], 6).unwrap().interior;
    let g = &t.interior;
    let u: Vec<f64> = (0..g.len()).map(|i| (i as f64 * 0.7).sin() + 0.3).collect();
    let mut ext = vec![0.0; big.len()];
    for (i, l) in g.labels().iter().enumerate() {
        ext[big.index_of(l).unwrap()] = u[i];
    }
    let l1 = laplacian_oracle(&big, &ext);
    let l2 = laplacian_oracle(&big, &l1);
    let lap = laplacian(g, &vf(g, &u)).unwrap();
    let bih = biharmonic(g, &vf(g, &u)).unwrap();
    for (i, l) in g.labels().iter().enumerate() {
        let j = big.index_of(l).unwrap();
        assert!((lap.values()[i] - l1[j]).abs() < 1e-12);
        assert!((bih.values()[i] - l2[j]).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn operators_match_oracles(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let g = common::random_graph(&mut r, 50);
        let u = common::random_function(&g, &mut r, 5.0);
        let phi = common::random_function(&g, &mut r, 5.0);
        let lu = laplacian(&g, &u).unwrap();
        let oracle = laplacian_oracle(&g, u.values());
        prop_assert!(close_all(lu.values(), &oracle, 1e-12));
        let bu = biharmonic(&g, &u).unwrap();
        prop_assert!(close_all(bu.values(), &laplacian_oracle(&g, &oracle), 1e-12));

        let ops = assemble(&g);
        prop_assert!(close_all(&ops.laplacian.apply(u.values()), lu.values(), 1e-12));
        prop_assert!(close_all(&ops.biharmonic.apply(u.values()), bu.values(), 1e-12));
        let llu = ops.laplacian.apply(&ops.laplacian.apply(u.values()));
        prop_assert!(close_all(&ops.biharmonic.apply(u.values()), &llu, 1e-12));
        prop_assert!(ops.dirichlet.row_sums().iter().all(|s| s.abs() < 1e-12));
        for (i, j, v) in ops.dirichlet.triplets() {
            prop_assert_eq!(ops.dirichlet.get(j, i), v);
        }

        let q = dirichlet_energy(&g, &u).unwrap();
        let du = ops.dirichlet.apply(u.values());
        let quad: f64 = du.iter().zip(u.values()).map(|(a, b)| a * b).sum();
        prop_assert!((quad - q).abs() <= 1e-12 * (1.0 + q));
        let vertexwise = integral(&g, &gamma_field(&g, &u, &u).unwrap()).unwrap();
        prop_assert!((vertexwise - q).abs() <= 1e-10 * (1.0 + q));

        // Green's identity and integration by parts for Δ².
        let neg_lu = VertexFunction::new(&g, lu.values().iter().zip(u.values()).map(|(a, b)| -a * b).collect()).unwrap();
        let green = integral(&g, &neg_lu).unwrap();
        prop_assert!((green - q).abs() <= 1e-10 * (1.0 + q.abs()));
        let lphi = laplacian(&g, &phi).unwrap();
        let lhs: f64 = g.measure().iter().zip(bu.values()).zip(phi.values()).map(|((m, a), b)| m * a * b).sum();
        let rhs: f64 = g.measure().iter().zip(lu.values()).zip(lphi.values()).map(|((m, a), b)| m * a * b).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));

        let sum_rule: f64 = g.measure().iter().zip(lu.values()).map(|(m, l)| m * l).sum();
        let scale: f64 = g.measure().iter().zip(lu.values()).map(|(m, l)| (m * l).abs()).sum();
        prop_assert!(sum_rule.abs() <= 1e-12 * (1.0 + scale));
        prop_assert!(gamma_field(&g, &u, &u).unwrap().values().iter().all(|&x| x >= 0.0));
    }
}
