//! Fixtures shared by the benchmarks.

use criterion::{BenchmarkId, Criterion};
use fpl_core::circuits::{run_circuit, CircuitSpec};
use fpl_core::entanglement::{reduced_density_matrix, von_neumann_entropy, SubsystemChoice};
use fpl_core::ops::eig_unitary;
use fpl_core::propagator::{evolve, initial_state};
use fpl_core::spectra::{r_statistics, EigenphaseSet, PhaseSource};
use fpl_core::{draw_disorder, floquet_unitary, DisorderRealization, SpinChainSpec, StateVector};

/// Thermal-phase chain of `n_sites` spins with one disorder draw.
pub fn thermal_chain(n_sites: usize) -> (SpinChainSpec, DisorderRealization) {
    let spec = SpinChainSpec::new(n_sites, 1.25, -1.25, 8.0, 3.0, 17).expect("valid chain");
    let disorder = draw_disorder(&spec, 0);
    (spec, disorder)
}

/// State after ten drive cycles of the thermal chain.
pub fn evolved_state(n_sites: usize) -> StateVector {
    let (spec, disorder) = thermal_chain(n_sites);
    let u = floquet_unitary(&spec, &disorder).expect("propagator converges").u;
    evolve(&initial_state(n_sites).expect("valid size"), &u, 10).expect("matching dims")
}

pub fn benchmarks(c: &mut Criterion) {
    let mut g = c.benchmark_group("floquet_unitary");
    g.sample_size(10);
    for n in [6, 8] {
        let (spec, disorder) = thermal_chain(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| floquet_unitary(&spec, &disorder).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("eigenphases");
    g.sample_size(10);
    for n in [6, 8] {
        let (spec, disorder) = thermal_chain(n);
        let u = floquet_unitary(&spec, &disorder).unwrap().u;
        g.bench_with_input(BenchmarkId::new("eig_unitary", n), &n, |b, _| b.iter(|| eig_unitary(&u).unwrap()));
        let set = EigenphaseSet::from_unitary(&u, PhaseSource::Floquet).unwrap();
        g.bench_with_input(BenchmarkId::new("r_statistics", n), &n, |b, _| {
            b.iter(|| r_statistics(&set).unwrap())
        });
    }
    g.finish();

    let state = evolved_state(9);
    let sub = SubsystemChoice::new(&[1, 4, 7], 9).unwrap();
    c.bench_function("entropy/L9_three_sites", |b| {
        b.iter(|| von_neumann_entropy(&reduced_density_matrix(&state, &sub).unwrap()).unwrap())
    });

    let spec = CircuitSpec::new(9, 40, 3).unwrap();
    let start = initial_state(9).unwrap();
    c.bench_function("circuit/L9_40_layers", |b| b.iter(|| run_circuit(&spec, &start).unwrap()));
}
