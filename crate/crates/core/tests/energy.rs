mod common;

use std::sync::Arc;

use graphpass_core::energy::{
    cerami_identity, jacobian_apply, jacobian_apply_with, phi, phi_directional, residual, self_pairing,
};
use graphpass_core::graph::{truncate_ball, IntegerLattice};
use graphpass_core::model::{ClosureNonlinearity, EvenExponential};
use graphpass_core::{Model, StatePair, WeightedGraph};
use proptest::prelude::*;
use rand::Rng;

fn zero_f() -> Arc<ClosureNonlinearity> {
    Arc::new(ClosureNonlinearity::new("zero", |_, _, _| 0.0, |_, _, _| [0.0, 0.0]).with_hessian(|_, _, _| [0.0; 3]))
}

fn weighted_pairing(g: &WeightedGraph, r: &StatePair, d: &StatePair) -> f64 {
    let mu = g.measure();
    (0..g.len()).map(|i| mu[i] * (r.u.values()[i] * d.u.values()[i] + r.v.values()[i] * d.v.values()[i])).sum()
}

#[test]
fn path2_examples() {
    let g = common::path(2);
    let state = StatePair::from_vecs(&g, vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
    let m = Model::uniform(&g, 1.0, [0.0, 0.0], 1.0, zero_f()).unwrap();
    let e = phi(&g, &m, &state).unwrap();
    assert_eq!(e.total, 2.0);
    assert_eq!(self_pairing(&g, &m, &state).unwrap(), 4.0);
    let k = Model::uniform(&g, 1.0, [4.0, 0.0], 1.0, zero_f()).unwrap();
    let e = phi(&g, &k, &state).unwrap();
    assert_eq!(e.kirchhoff_u, 1.0);
    assert_eq!(e.total, 3.0);

    let zero = StatePair::zeros(&g);
    let s = common::sextic_model(&g, [1.0, 1.0]);
    assert_eq!(phi(&g, &s, &zero).unwrap().total, 0.0);
    let r = residual(&g, &s, &zero).unwrap();
    assert!(r.u.values().iter().chain(r.v.values()).all(|&x| x == 0.0));
    assert_eq!(cerami_identity(&g, &s, &zero).unwrap().gap, 0.0);
    assert_eq!(phi_directional(&g, &s, &state, &zero).unwrap(), 0.0);
    let j = jacobian_apply(&g, &s, &state, &zero).unwrap();
    assert!(j.u.values().iter().chain(j.v.values()).all(|&x| x == 0.0));
}

#[test]
fn single_vertex_residual() {
    let (g, m) = common::quartic_single();
    for u in [-1.5, -0.3, 0.0, 0.8, 2.0] {
        let r = residual(&g, &m, &StatePair::from_vecs(&g, vec![u], vec![0.0]).unwrap()).unwrap();
        assert!((r.u.values()[0] - (u - u * u * u)).abs() < 1e-14);
    }
}

#[test]
fn missing_hessian_without_fallback() {
    let g = common::path(2);
    let f =
        ClosureNonlinearity::new("quartic", |_, s, t| 0.25 * (s.powi(4) + t.powi(4)), |_, s, t| [s.powi(3), t.powi(3)]);
    let m = Model::uniform(&g, 1.0, [0.0, 0.0], 1.0, Arc::new(f)).unwrap();
    let s = StatePair::from_vecs(&g, vec![1.0, 0.5], vec![0.2, 0.0]).unwrap();
    let err = jacobian_apply_with(&g, &m, &s, &s, false).unwrap_err();
    assert_eq!(err.reason(), "MissingSecondPartials");
    assert!(jacobian_apply_with(&g, &m, &s, &s, true).is_ok());
}

#[test]
fn truncated_pairing_matches_residual() {
    let z2 = IntegerLattice::new(2).unwrap();
    let t = truncate_ball(&z2, &vec![0, 0], 2).unwrap();
    let g = &t.interior;
    let mut r = common::rng(5);
    let m = common::random_sextic_model(g, &mut r, [0.7, 1.3]);
    for _ in 0..20 {
        let s = common::random_state(g, &mut r, 1.0);
        let d = common::random_state(g, &mut r, 1.0);
        let pairing = phi_directional(g, &m, &s, &d).unwrap();
        let strong = weighted_pairing(g, &residual(g, &m, &s).unwrap(), &d);
        assert!(common::rel_close(pairing, strong, 1e-10), "{pairing} vs {strong}");
    }
}

#[test]
fn exponential_model_cerami_theta_two() {
    let g = common::path(4);
    let f = EvenExponential::new(vec![0.4; 4]).unwrap();
    let m = Model::uniform(&g, 1.0, [0.0, 0.0], 1.0, Arc::new(f)).unwrap();
    let mut r = common::rng(8);
    for _ in 0..50 {
        let s = common::random_state(&g, &mut r, 1.5);
        let c = cerami_identity(&g, &m, &s).unwrap();
        assert_eq!(c.theta, 2.0);
        assert!(c.gap <= 1e-9 * (1.0 + c.phi.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn derivatives_agree(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let g = common::random_graph(&mut r, 12);
        let b = [r.random_range(0.0..2.0), r.random_range(0.0..2.0)];
        let m = common::random_sextic_model(&g, &mut r, b);
        let s = common::random_state(&g, &mut r, 1.0);
        let d = common::random_state(&g, &mut r, 1.0);

        let analytic = phi_directional(&g, &m, &s, &d).unwrap();
        let h = 1e-5;
        let fd = (phi(&g, &m, &s.axpy(h, &d)).unwrap().total - phi(&g, &m, &s.axpy(-h, &d)).unwrap().total) / (2.0 * h);
        prop_assert!((analytic - fd).abs() <= 1e-6 * analytic.abs().max(fd.abs()).max(1e-9) + 1e-9);

        let strong = weighted_pairing(&g, &residual(&g, &m, &s).unwrap(), &d);
        prop_assert!(common::rel_close(analytic, strong, 1e-10));

        let j = jacobian_apply(&g, &m, &s, &d).unwrap();
        let rp = residual(&g, &m, &s.axpy(h, &d)).unwrap();
        let rm = residual(&g, &m, &s.axpy(-h, &d)).unwrap();
        let scale = 1.0 + j.sup_norm();
        for i in 0..g.len() {
            let fu = (rp.u.values()[i] - rm.u.values()[i]) / (2.0 * h);
            let fv = (rp.v.values()[i] - rm.v.values()[i]) / (2.0 * h);
            prop_assert!((j.u.values()[i] - fu).abs() <= 1e-5 * scale);
            prop_assert!((j.v.values()[i] - fv).abs() <= 1e-5 * scale);
        }

        let e = common::random_state(&g, &mut r, 1.0);
        let jde = weighted_pairing(&g, &jacobian_apply(&g, &m, &s, &d).unwrap(), &e);
        let jed = weighted_pairing(&g, &jacobian_apply(&g, &m, &s, &e).unwrap(), &d);
        prop_assert!(common::rel_close(jde, jed, 1e-8));
    }

    #[test]
    fn cerami_gap_and_evenness(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let g = common::random_graph(&mut r, 15);
        let kirchhoff = r.random_bool(0.5);
        let b = if kirchhoff { [r.random_range(0.0..3.0), r.random_range(0.0..3.0)] } else { [0.0, 0.0] };
        let m = common::random_sextic_model(&g, &mut r, b);
        let s = common::random_state(&g, &mut r, 1.5);
        let c = cerami_identity(&g, &m, &s).unwrap();
        prop_assert!(c.gap <= 1e-9 * (1.0 + c.phi.abs()), "{:?}", c);
        let e = phi(&g, &m, &s).unwrap();
        let sum = e.quad_u + e.quad_v + e.kirchhoff_u + e.kirchhoff_v - e.potential_term;
        prop_assert!((sum - e.total).abs() <= 1e-12 * (1.0 + e.total.abs()));
        let flipped = phi(&g, &m, &s.negated()).unwrap().total;
        prop_assert!((flipped - e.total).abs() <= 1e-10 * (1.0 + e.total.abs()));
    }
}
