mod common;

use synclattice::dynamics::{CouplingGraph, CouplingKind, GlobalState, LatticeSystem, ModelKind};
use synclattice::metric::ShiftWindow;
use synclattice::transition::{
    contraction_factor, drift_rate, find_lambda_c, order_parameter, stroboscopic_fixed_point,
    sweep, transverse_multiplier, ExperimentSpec, InitialConditions, MultiplierOptions,
};
use synclattice::Error;

fn spec(omegas: [f64; 2], t_max: f64) -> ExperimentSpec {
    ExperimentSpec::new(common::phase_pair(omegas, 0.0), ShiftWindow::with_t_max(t_max).unwrap())
}

#[test]
fn identical_pair_synchronizes() {
    let r = order_parameter(&spec([1.0, 1.0], 0.0), 1.0).unwrap();
    assert!(r < 1e-3, "{r}");
}

#[test]
fn diagonal_start_stays_put() {
    let mut s = spec([1.0, 1.0], 0.0);
    s.initial = InitialConditions::Given(vec![GlobalState::phases(&[0.4, 0.4]).unwrap()]);
    assert!(order_parameter(&s, 0.0).unwrap() < 1e-9);
    assert!(drift_rate(&s, 0.7).unwrap() < 1e-9);
}

#[test]
fn weak_coupling_stays_incoherent() {
    let r = order_parameter(&spec([-0.5, 0.5], 2.0), 0.1).unwrap();
    assert!(r > 0.05, "{r}");
}

#[test]
fn drift_matches_frequency_mismatch() {
    let s = spec([-0.5, 0.5], 2.0);
    assert!((drift_rate(&s, 0.0).unwrap() - 1.0).abs() < 1e-3);
    assert!(drift_rate(&s, 1.0).unwrap() < 1e-4);
}

#[test]
fn drift_rejects_planar_models() {
    let sys = LatticeSystem::planar_limit_cycles(&[1.0, 1.0], CouplingGraph::complete(2).unwrap(), 0.1)
        .unwrap();
    let s = ExperimentSpec::new(sys, ShiftWindow::with_t_max(1.0).unwrap());
    assert!(matches!(drift_rate(&s, 0.1), Err(Error::ModelMismatch(_))));
}

#[test]
fn contraction_near_diagonal() {
    let s = spec([0.0, 0.0], 1.0);
    let eta = contraction_factor(&s, 0.5, 1.0, 16).unwrap();
    assert!((eta - (-1.0f64).exp()).abs() < 0.02, "{eta}");
    let eta0 = contraction_factor(&s, 0.0, 1.0, 16).unwrap();
    assert!((eta0 - 1.0).abs() < 1e-6, "{eta0}");
}

#[test]
fn contraction_without_window_on_rotating_nodes() {
    let s = spec([1.0, 1.0], 0.0);
    let eta = contraction_factor(&s, 0.5, 1.0, 16).unwrap();
    assert!((eta - (-1.0f64).exp()).abs() < 0.02, "{eta}");
}

#[test]
fn contraction_degenerate_pairs_are_inconclusive() {
    let mut s = spec([0.0, 0.0], 1.0);
    s.probe.pairs = synclattice::transition::PairSampling::NearDiagonal { scale: 1e-12 };
    assert!(matches!(contraction_factor(&s, 0.5, 1.0, 4), Err(Error::Inconclusive(_))));
}

#[test]
fn multiplier_closed_form() {
    for (lambda, t0) in [(0.5, 1.0), (0.25, 2.0), (1.0, 1.0)] {
        let mu = transverse_multiplier(&common::phase_pair([1.0, 1.0], lambda), t0, &MultiplierOptions::default())
            .unwrap();
        let expect = (-2.0 * lambda * t0).exp();
        assert!((mu - expect).abs() < 1e-3, "λ={lambda}: {mu} vs {expect}");
    }
    let mu0 = transverse_multiplier(&common::phase_pair([1.0, 1.0], 0.0), 1.0, &MultiplierOptions::default())
        .unwrap();
    assert!((mu0 - 1.0).abs() < 1e-6);
}

#[test]
fn strobe_from_random_states() {
    let sys = LatticeSystem::phase_oscillators(
        &[1.0; 3],
        CouplingGraph::complete(3).unwrap(),
        CouplingKind::SineDifference,
        1.0,
    )
    .unwrap();
    let mut rng = common::rng(5);
    for _ in 0..5 {
        let x0 = GlobalState::random(ModelKind::PhaseOscillator, 3, &mut rng);
        let r = stroboscopic_fixed_point(&sys, 1.0, &x0, 200, 1e-10, 1e-3).unwrap();
        assert!(r.converged && r.residual < 1e-10);
        assert!(r.strict_sync < 1e-6, "{}", r.strict_sync);
    }
}

#[test]
fn sweep_classifies_benchmark() {
    let s = spec([-0.5, 0.5], 2.0);
    let res = sweep(&s, &[0.1, 0.3, 0.7, 1.0]).unwrap();
    let flags: Vec<bool> = res.rows.iter().map(|r| r.classified_coherent).collect();
    assert_eq!(flags, [false, false, true, true]);
    for row in &res.rows {
        assert!(row.is_complete(), "{:?}", row.notes);
        if row.mu < 0.95 {
            assert!(row.classified_coherent);
        }
    }
}

#[test]
fn sweep_identical_is_coherent() {
    let res = sweep(&spec([1.0, 1.0], 0.5), &[0.2]).unwrap();
    assert!(res.rows[0].classified_coherent);
}

#[test]
fn sweep_is_deterministic() {
    let s = spec([-0.5, 0.5], 2.0);
    let a = sweep(&s, &[0.2, 0.6]).unwrap();
    let b = sweep(&s, &[0.2, 0.6]).unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!(x.r.to_bits(), y.r.to_bits());
        assert_eq!(x.drift.to_bits(), y.drift.to_bits());
        assert_eq!(x.eta.to_bits(), y.eta.to_bits());
        assert_eq!(x.mu.to_bits(), y.mu.to_bits());
    }
    let single = sweep(&s, &[0.6]).unwrap();
    assert_eq!(single.rows[0].r.to_bits(), a.rows[1].r.to_bits());
}

#[test]
fn planar_sweep_fills_drift_with_nan() {
    let sys = LatticeSystem::planar_limit_cycles(&[1.0, 1.0], CouplingGraph::complete(2).unwrap(), 0.0)
        .unwrap();
    let mut s = ExperimentSpec::new(sys, ShiftWindow::with_t_max(0.5).unwrap());
    s.t_total = 20.0;
    s.t_transient = 10.0;
    s.n_initial_conditions = 2;
    let res = sweep(&s, &[0.5]).unwrap();
    let row = &res.rows[0];
    assert!(row.drift.is_nan());
    assert!(row.r.is_finite() && row.eta.is_finite() && row.mu.is_finite());
}

#[test]
fn threshold_for_wider_mismatch() {
    let est = find_lambda_c(&spec([-1.0, 1.0], 1.0), 0.05, 1.5, 0.01).unwrap();
    assert!((est.lambda_c - 1.0).abs() < 0.05, "{est:?}");
}

#[test]
fn threshold_needs_a_sign_change() {
    let err = find_lambda_c(&spec([-0.5, 0.5], 2.0), 0.8, 1.5, 0.01).unwrap_err();
    match err {
        Error::SameClassification { r_lo, r_hi, coherent, .. } => {
            assert!(coherent && r_lo < 1e-2 && r_hi < 1e-2);
        }
        e => panic!("unexpected {e}"),
    }
}
