mod common;

use graphpass_core::solver::{
    antipode, e_distance, enumerate, mountain_pass, multi_start, newton_solve, weak_form_check, LinearSolve, Outcome,
    Provenance,
};
use graphpass_core::{Error, SolverConfig, StatePair};

fn single_state(g: &graphpass_core::WeightedGraph, u: f64, v: f64) -> StatePair {
    StatePair::from_vecs(g, vec![u], vec![v]).unwrap()
}

#[test]
fn scalar_roots_of_cubic() {
    let (g, m) = common::quartic_single();
    let m = m.with_scalar_reduction().unwrap();
    let cfg = SolverConfig::default();
    let one = newton_solve(&g, &m, &cfg, &single_state(&g, 1.2, 1.2), &[]).unwrap();
    assert!((one.state.u.values()[0] - 1.0).abs() < 1e-12);
    let zero = newton_solve(&g, &m, &cfg, &single_state(&g, 0.0, 0.0), &[]).unwrap();
    assert!(zero.is_trivial && zero.iterations <= 1);
    let minus = newton_solve(&g, &m, &cfg, &single_state(&g, -1.2, -1.2), &[one.clone(), zero]).unwrap();
    assert!((minus.state.u.values()[0] + 1.0).abs() < 1e-12);
    assert_eq!(minus.method, Provenance::NewtonDeflated);

    let anti = antipode(&g, &m, &one, 1e-9).unwrap();
    assert!((anti.state.u.values()[0] + 1.0).abs() < 1e-12);
    assert_eq!(anti.energy, one.energy);
}

#[test]
fn mountain_pass_far_point_and_level() {
    let (g, m) = common::quartic_single();
    let far = single_state(&g, 2.0, 0.0);
    assert_eq!(graphpass_core::energy::phi(&g, &m, &far).unwrap().total, -2.0);
    let rec = mountain_pass(&g, &m, &SolverConfig::default(), &far).unwrap();
    assert!((rec.energy - 0.25).abs() <= 1e-8);
    assert!(rec.residual_sup <= 1e-9);
    // A short far point is doubled until the energy turns negative.
    let rec = mountain_pass(&g, &m, &SolverConfig::default(), &single_state(&g, 0.1, 0.0)).unwrap();
    assert!((rec.energy - 0.25).abs() <= 1e-8);
    let zero = single_state(&g, 0.0, 0.0);
    let err = mountain_pass(&g, &m, &SolverConfig::default(), &zero).unwrap_err();
    assert_eq!(err, Error::BadFarPoint);
}

#[test]
fn single_vertex_enumeration() {
    let (g, m) = common::quartic_single();
    let e = enumerate(&g, &m, &SolverConfig::default(), 1).unwrap();
    assert_eq!(e.outcome, Outcome::Complete);
    assert!((e.levels[0].energy - 0.25).abs() <= 1e-8);
    let sol = e.solutions();
    assert_eq!(sol.len(), 2);
    assert!((sol[0].state.sup_norm() - 1.0).abs() < 1e-9);
    assert_eq!(sol[1].state, sol[0].state.negated());

    // Only the levels 1/4 and 1/2 exist.
    let e = enumerate(&g, &m, &SolverConfig::default(), 5).unwrap();
    assert_eq!(e.outcome, Outcome::FoundFewer { found: 2, requested: 5 });
    assert!((e.levels[1].energy - 0.5).abs() <= 1e-8);
}

#[test]
fn path3_levels_increase_and_verify() {
    let g = common::path(3);
    let m = common::sextic_model(&g, [0.0, 0.0]);
    let e = enumerate(&g, &m, &SolverConfig::default(), 3).unwrap();
    assert_eq!(e.outcome, Outcome::Complete);
    assert!(e.levels.windows(2).all(|w| w[0].energy < w[1].energy));
    for rec in e.solutions() {
        assert!(!rec.is_trivial);
        assert!(rec.residual_sup <= 1e-9);
        assert!(weak_form_check(&g, &m, &rec.state, 1e-9, 20, 3).unwrap());
        let back = antipode(&g, &m, &rec, 1e-9).unwrap();
        assert!(e_distance(&g, &m, &back.state, &rec.state.negated()).unwrap() < 1e-12);
    }
    let mp = e.mountain_pass.as_ref().unwrap();
    assert!(mp.energy > 0.0);
}

#[test]
fn deflation_never_returns_the_known_root() {
    let g = common::path(3);
    let m = common::sextic_model(&g, [1.0, 1.0]);
    let cfg = SolverConfig::default();
    let roots = multi_start(&g, &m, &SolverConfig { seed: 4, ..cfg.clone() }, 60, 2.0).unwrap();
    let nontrivial: Vec<_> = roots.into_iter().filter(|r| !r.is_trivial).collect();
    assert!(!nontrivial.is_empty());
    let mut r = common::rng(21);
    for trial in 0..50 {
        let w = &nontrivial[trial % nontrivial.len()];
        let eps = common::random_state(&g, &mut r, 1e-3);
        let start = w.state.axpy(1.0, &eps);
        match newton_solve(&g, &m, &cfg, &start, std::slice::from_ref(w)) {
            Ok(found) => assert!(e_distance(&g, &m, &found.state, &w.state).unwrap() > 1e-6),
            Err(Error::NoConvergence(_)) | Err(Error::SingularJacobian(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn enumeration_is_deterministic() {
    let g = common::path(4);
    let m = common::sextic_model(&g, [1.0, 1.0]);
    let cfg = SolverConfig { random_starts: 60, seed: 17, ..SolverConfig::default() };
    let a = enumerate(&g, &m, &cfg, 3).unwrap();
    let b = enumerate(&g, &m, &cfg, 3).unwrap();
    assert_eq!(a.solutions(), b.solutions());
    assert_eq!(a.all_roots, b.all_roots);
    assert_eq!(a.starts_tried, b.starts_tried);
}

#[test]
fn matrix_free_agrees_with_dense() {
    let g = common::path(5);
    let m = common::sextic_model(&g, [1.0, 1.0]);
    let dense = SolverConfig { linear_solve: LinearSolve::Dense, ..SolverConfig::default() };
    let free = SolverConfig { linear_solve: LinearSolve::MatrixFree, ..SolverConfig::default() };
    let mut r = common::rng(2);
    let mut agreed = 0;
    for _ in 0..10 {
        let start = common::random_state(&g, &mut r, 1.5);
        let (a, b) = (newton_solve(&g, &m, &dense, &start, &[]), newton_solve(&g, &m, &free, &start, &[]));
        if let (Ok(a), Ok(b)) = (a, b) {
            assert!(b.residual_sup <= 1e-9);
            if e_distance(&g, &m, &a.state, &b.state).unwrap() < 1e-6 {
                agreed += 1;
            }
        }
    }
    assert!(agreed >= 5, "only {agreed} starts agreed");
    let mp = mountain_pass(&g, &m, &free, &StatePair::from_vecs(&g, vec![1.0; 5], vec![1.0; 5]).unwrap()).unwrap();
    assert!(mp.residual_sup <= 1e-9 && mp.energy > 0.0);
}

#[test]
fn mountain_pass_clears_ring_floor() {
    let g = common::path(3);
    let m = common::sextic_model(&g, [1.0, 1.0]);
    let report = graphpass_core::model::audit(&g, &m, &Default::default()).unwrap();
    let e = enumerate(&g, &m, &SolverConfig::default(), 1).unwrap();
    let mp = e.mountain_pass.expect("mountain pass record");
    if let Some(alpha) = report.constants.alpha_star.filter(|a| *a > 0.0) {
        assert!(mp.energy >= alpha);
    }
}

#[test]
fn config_validation() {
    let bad = SolverConfig { tol_residual: 0.0, ..SolverConfig::default() };
    assert_eq!(bad.validate().unwrap_err().reason(), "BadParams");
    let mut short = SolverConfig::default();
    short.mp.path_points = 2;
    assert_eq!(short.validate().unwrap_err().reason(), "BadParams");
}
