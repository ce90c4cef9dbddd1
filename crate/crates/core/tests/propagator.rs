mod common;

use common::*;
use fpl_core::model::build_h0;
use fpl_core::ops::{eigvals_hermitian, Axis, PauliString};
use fpl_core::propagator::{
    evolve, floquet_unitary_with, initial_state, midpoint_unitary, propagate_interval, PropagatorConfig,
};
use fpl_core::spectra::PhaseSource;
use fpl_core::{draw_disorder, floquet_unitary, EigenphaseSet};

#[test]
fn midpoint_product_converges_to_the_certified_unitary() {
    let spec = chain(4, 8.0, 3.0, 5);
    let disorder = draw_disorder(&spec, 0);
    let u = floquet_unitary(&spec, &disorder).unwrap().u;
    let coarse = midpoint_unitary(&spec, &disorder, 1000).unwrap().max_abs_diff(&u).unwrap();
    let fine = midpoint_unitary(&spec, &disorder, 2000).unwrap().max_abs_diff(&u).unwrap();
    // second order: halving the slice halves the error twice
    assert!((coarse / fine - 4.0).abs() < 0.2, "{coarse:e} {fine:e}");
    assert!(fine < 1e-4);
}

#[test]
fn half_periods_compose_to_one_period() {
    let spec = chain(5, 6.0, 4.0, 8);
    let disorder = draw_disorder(&spec, 1);
    let half = 0.5 * spec.period();
    let first = propagate_interval(&spec, &disorder, 0.0, half).unwrap();
    let second = propagate_interval(&spec, &disorder, half, spec.period()).unwrap();
    let u = floquet_unitary(&spec, &disorder).unwrap().u;
    assert!(second.compose(&first).unwrap().max_abs_diff(&u).unwrap() < 1e-9);
}

#[test]
fn certified_unitary_agrees_with_a_tighter_run() {
    let spec = chain(5, 8.0, 3.0, 2);
    let disorder = draw_disorder(&spec, 3);
    let ops = floquet_unitary(&spec, &disorder).unwrap();
    assert!(ops.convergence_defect < 1e-8);
    assert!(ops.u.unitarity_defect() < 1e-12);
    let tight = PropagatorConfig {
        tolerance: 1e-12,
        ..PropagatorConfig::default()
    };
    let reference = floquet_unitary_with(&spec, &disorder, &tight).unwrap();
    assert!(reference.slices_used >= ops.slices_used);
    assert!(ops.u.max_abs_diff(&reference.u).unwrap() < 1e-8);
}

#[test]
fn drive_effect_fades_with_frequency() {
    let gap_at = |omega| {
        let spec = chain(4, omega, 3.0, 9);
        let disorder = draw_disorder(&spec, 0);
        let ops = floquet_unitary(&spec, &disorder).unwrap();
        ops.u.max_abs_diff(&ops.u0).unwrap()
    };
    let gaps: Vec<f64> = [10.0, 20.0, 40.0, 80.0].into_iter().map(gap_at).collect();
    assert!(gaps.windows(2).all(|p| p[1] < p[0]), "{gaps:?}");
}

#[test]
fn clean_chain_conserves_spin_flip_parity() {
    let spec = chain(4, 7.0, 0.0, 0);
    let disorder = draw_disorder(&spec, 0);
    assert!(disorder.fields().iter().all(|&h| h == 0.0));
    let all_x: Vec<(usize, Axis)> = (0..4).map(|s| (s, Axis::X)).collect();
    let parity = PauliString::new(&all_x).unwrap().to_dense(4).unwrap();
    let h0 = build_h0(&spec, &disorder).unwrap();
    assert!(h0.commutator(&parity).unwrap().max_abs() < 1e-12);
    let u = floquet_unitary(&spec, &disorder).unwrap().u;
    let p = parity.matrix();
    assert!(max_diff(&(u.matrix() * p), &(p * u.matrix())) < 1e-10);
}

#[test]
fn static_phases_are_minus_energies_times_period() {
    let spec = chain(4, 5.0, 2.0, 4);
    let disorder = draw_disorder(&spec, 2);
    let ops = floquet_unitary(&spec, &disorder).unwrap();
    let from_u0 = EigenphaseSet::from_unitary(&ops.u0, PhaseSource::Static).unwrap();
    let energies = eigvals_hermitian(&build_h0(&spec, &disorder).unwrap()).unwrap();
    let from_h0 = EigenphaseSet::from_energies(&energies, spec.period()).unwrap();
    for (a, b) in from_u0.phases().iter().zip(from_h0.phases()) {
        let d = (a - b).rem_euclid(std::f64::consts::TAU);
        assert!(d.min(std::f64::consts::TAU - d) < 1e-9);
    }
}

#[test]
fn stroboscopic_evolution_keeps_the_norm() {
    let spec = chain(6, 8.0, 3.0, 1);
    let disorder = draw_disorder(&spec, 0);
    let u = floquet_unitary(&spec, &disorder).unwrap().u;
    let state = evolve(&initial_state(6).unwrap(), &u, 50).unwrap();
    assert!((state.norm() - 1.0).abs() < 1e-11);
}
