mod common;

use common::*;
use faer::Scale;
use fpl_core::circuits::{apply_layer, CzSchedule, Gate};
use fpl_core::magnus::magnus_h2;
use fpl_core::model::build_h0;
use fpl_core::ops::{eigvals_hermitian, Axis};
use fpl_core::{DisorderRealization, SpinChainSpec, StateVector};

#[test]
fn bit_kernels_match_kronecker_products() {
    for (name, err) in kronecker_suite() {
        assert!(err < 1e-13, "{name}: {err:e}");
    }
}

#[test]
fn three_site_h0_spectrum() {
    let spec = SpinChainSpec::new(3, 1.25, -1.25, 8.0, 1.0, 0).unwrap();
    let disorder = DisorderRealization::new(vec![0.1, -0.2, 0.3]).unwrap();
    let (d, x) = chain_parts(&spec, &disorder);
    let oracle = fpl_core::DenseOperator::hermitian(d + re(1.25, x)).unwrap();
    let want = eigvals_hermitian(&oracle).unwrap();
    let got = eigvals_hermitian(&build_h0(&spec, &disorder).unwrap()).unwrap();
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn forced_two_qubit_layer() {
    // √X on site 0, T on site 1, then CZ, starting from |↑↑⟩
    let mut state = StateVector::basis(2, 0).unwrap();
    apply_layer(&mut state, &[Gate::SqrtX, Gate::T], 0, CzSchedule::Brickwork).unwrap();
    let u = cz(2, 0, 1) * embed(2, &[(0, mat2(Gate::SqrtX.matrix())), (1, mat2(Gate::T.matrix()))]);
    let want = apply(&u, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    assert!(vec_diff(state.amplitudes(), &want) < 1e-15);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!(vec_diff(&want, &[c(r, 0.0), c(0.0, -r), c(0.0, 0.0), c(0.0, 0.0)]) < 1e-15);
}

#[test]
fn magnus_first_order_vanishes_at_zero_phase() {
    let (h1_zero, _, _) = magnus_suite();
    assert_eq!(h1_zero, 0.0);
}

#[test]
fn magnus_terms_match_nested_quadrature() {
    let (_, h1_err, h2_err) = magnus_suite();
    assert!(h1_err < 1e-6, "H1 {h1_err:e}");
    assert!(h2_err < 1e-5, "H2 {h2_err:e}");
}

#[test]
fn magnus_h2_without_fields_keeps_only_coupling_terms() {
    let spec = SpinChainSpec::new(3, 0.0, -1.25, 8.0, 0.0, 0).unwrap();
    let disorder = DisorderRealization::zeros(3);
    let got = magnus_h2(&spec, &disorder).unwrap();
    let a = -4.0 * spec.delta_b / (spec.omega * spec.omega);
    let b = -spec.delta_b * spec.delta_b / (spec.omega * spec.omega);
    let want = (pauli_string(3, &[(0, Axis::X)])
        + re(2.0, pauli_string(3, &[(1, Axis::X)]))
        + pauli_string(3, &[(2, Axis::X)])
        + re(2.0, pauli_string(3, &[(0, Axis::Z), (1, Axis::X), (2, Axis::Z)])))
        * Scale(c(a, 0.0))
        + (pauli_string(3, &[(0, Axis::Z), (1, Axis::Z)]) + pauli_string(3, &[(1, Axis::Z), (2, Axis::Z)])
            - pauli_string(3, &[(0, Axis::Y), (1, Axis::Y)])
            - pauli_string(3, &[(1, Axis::Y), (2, Axis::Y)]))
            * Scale(c(2.0 * b, 0.0));
    assert!(max_diff(got.matrix(), &want) < 1e-14);
    assert!(max_diff(got.matrix(), &magnus_h2_oracle(&spec, &disorder, 20)) < 1e-5);
}

#[test]
fn zeroth_order_defect_shrinks_with_frequency() {
    assert!(mean_zeroth_defect(40.0, 5) < mean_zeroth_defect(8.0, 5));
}
