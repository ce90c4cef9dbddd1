//! Independent dense oracles shared by the integration tests and the
//! acceptance runner. Everything here is built from explicit Kronecker
//! products and index sums, never from the bit kernels under test.

#![allow(dead_code)]

use std::num::NonZeroUsize;

use faer::{Mat, Scale};
use fpl_core::ops::Axis;
use fpl_core::{DisorderRealization, SpinChainSpec};
use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type M = Mat<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `k · m` for real `k`.
pub fn re(k: f64, m: M) -> M {
    Scale(c(k, 0.0)) * m
}

pub fn mat2(m: [[C64; 2]; 2]) -> M {
    Mat::from_fn(2, 2, |i, j| m[i][j])
}

/// Pauli matrices in the `(↑, ↓)` basis.
pub fn pauli(axis: Axis) -> M {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    mat2(match axis {
        Axis::X => [[z, o], [o, z]],
        Axis::Y => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
        Axis::Z => [[o, z], [z, -o]],
    })
}

pub fn kron(a: &M, b: &M) -> M {
    let (ra, ca, rb, cb) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

/// `ops[L−1] ⊗ … ⊗ ops[0]`: site 0 is the least significant bit.
pub fn kron_chain(ops: &[M]) -> M {
    ops.iter()
        .rev()
        .fold(Mat::identity(1, 1), |acc, op| kron(&acc, op))
}

/// Embeds single-site operators at the given sites, identity elsewhere.
pub fn embed(n_sites: usize, factors: &[(usize, M)]) -> M {
    let ops: Vec<M> = (0..n_sites)
        .map(|s| {
            factors
                .iter()
                .find(|(site, _)| *site == s)
                .map_or_else(|| Mat::identity(2, 2), |(_, m)| m.clone())
        })
        .collect();
    kron_chain(&ops)
}

pub fn pauli_string(n_sites: usize, factors: &[(usize, Axis)]) -> M {
    let f: Vec<(usize, M)> = factors.iter().map(|&(s, a)| (s, pauli(a))).collect();
    embed(n_sites, &f)
}

/// CZ on sites `a`, `b` as `P↑⊗I + P↓⊗Z`.
pub fn cz(n_sites: usize, a: usize, b: usize) -> M {
    let up = mat2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]]);
    let down = mat2([[c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
    embed(n_sites, &[(a, up)]) + embed(n_sites, &[(a, down), (b, pauli(Axis::Z))])
}

pub fn max_diff(a: &M, b: &M) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

pub fn vec_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn apply(m: &M, v: &[C64]) -> Vec<C64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

pub fn random_amplitudes(dim: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..dim)
        .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

/// `Tr_B |ψ⟩⟨ψ|` by explicit summation over the complement's bit patterns.
pub fn partial_trace(amps: &[C64], n_sites: usize, keep: &[usize]) -> M {
    let rest: Vec<usize> = (0..n_sites).filter(|s| !keep.contains(s)).collect();
    let compose = |a: usize, b: usize| {
        let mut z = 0usize;
        for (k, &s) in keep.iter().enumerate() {
            z |= ((a >> k) & 1) << s;
        }
        for (k, &s) in rest.iter().enumerate() {
            z |= ((b >> k) & 1) << s;
        }
        z
    };
    let n_s = 1 << keep.len();
    Mat::from_fn(n_s, n_s, |i, j| {
        (0..1usize << rest.len())
            .map(|b| amps[compose(i, b)] * amps[compose(j, b)].conj())
            .sum()
    })
}

pub fn chain(n_sites: usize, omega: f64, w: f64, seed: u64) -> SpinChainSpec {
    SpinChainSpec::new(n_sites, 1.25, -1.25, omega, w, seed).unwrap()
}

/// `Σ h_i Z_i + J Σ Z_i Z_{i+1}` and `Σ X_i` from Kronecker products.
pub fn chain_parts(spec: &SpinChainSpec, disorder: &DisorderRealization) -> (M, M) {
    let l = spec.n_sites;
    let dim = 1 << l;
    let mut d = Mat::<C64>::zeros(dim, dim);
    let mut x = Mat::<C64>::zeros(dim, dim);
    for (i, &h) in disorder.fields().iter().enumerate() {
        d += re(h, pauli_string(l, &[(i, Axis::Z)]));
        x += pauli_string(l, &[(i, Axis::X)]);
    }
    for i in 0..l - 1 {
        d += re(spec.j, pauli_string(l, &[(i, Axis::Z), (i + 1, Axis::Z)]));
    }
    (d, x)
}

pub fn hamiltonian_at(spec: &SpinChainSpec, parts: &(M, M), t: f64) -> M {
    &parts.0 + re(spec.field(t), parts.1.clone())
}

fn comm(a: &M, b: &M) -> M {
    a * b - b * a
}

/// Gauss-Legendre nodes and weights mapped to `[a, b]`.
fn rule(quad: &GaussLegendre, a: f64, b: f64) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    quad.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (a + half * (x + 1.0), half * w))
        .collect()
}

fn gauss(degree: usize) -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(degree).unwrap())
}

/// `(1/2iT) ∫_{t0}^{t0+T} dτ1 ∫_{t0}^{τ1} dτ2 [H(τ1), H(τ2)]` by nested quadrature.
pub fn magnus_h1_oracle(spec: &SpinChainSpec, disorder: &DisorderRealization, t0: f64, degree: usize) -> M {
    let parts = chain_parts(spec, disorder);
    let period = spec.period();
    let quad = gauss(degree);
    let dim = spec.dim();
    let mut acc = Mat::<C64>::zeros(dim, dim);
    for (t1, w1) in rule(&quad, t0, t0 + period) {
        let h1 = hamiltonian_at(spec, &parts, t1);
        for (t2, w2) in rule(&quad, t0, t1) {
            acc += re(w1 * w2, comm(&h1, &hamiltonian_at(spec, &parts, t2)));
        }
    }
    Scale(c(0.0, -1.0 / (2.0 * period))) * acc
}

/// `−(1/6T) ∫∫∫_{τ1>τ2>τ3} ([H1,[H2,H3]] + [H3,[H2,H1]])` over one period from 0.
pub fn magnus_h2_oracle(spec: &SpinChainSpec, disorder: &DisorderRealization, degree: usize) -> M {
    let parts = chain_parts(spec, disorder);
    let period = spec.period();
    let quad = gauss(degree);
    let dim = spec.dim();
    let mut acc = Mat::<C64>::zeros(dim, dim);
    for (t1, w1) in rule(&quad, 0.0, period) {
        let a = hamiltonian_at(spec, &parts, t1);
        for (t2, w2) in rule(&quad, 0.0, t1) {
            let b = hamiltonian_at(spec, &parts, t2);
            for (t3, w3) in rule(&quad, 0.0, t2) {
                let h3 = hamiltonian_at(spec, &parts, t3);
                let term = comm(&a, &comm(&b, &h3)) + comm(&h3, &comm(&b, &a));
                acc += re(w1 * w2 * w3, term);
            }
        }
    }
    re(-1.0 / (6.0 * period), acc)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Worst deviation of each bit-level operation family from its Kronecker
/// oracle, exhaustively over positions for `L ≤ 4`.
pub fn kronecker_suite() -> Vec<(&'static str, f64)> {
    use fpl_core::circuits::Gate;
    use fpl_core::entanglement::{reduced_density_matrix, SubsystemChoice};
    use fpl_core::model::build_hamiltonian;
    use fpl_core::ops::kernels::{add_transverse_sum, apply_cz, apply_single_site};
    use fpl_core::ops::{apply_pauli_string, PauliString};
    use fpl_core::StateVector;

    let axes = [None, Some(Axis::X), Some(Axis::Y), Some(Axis::Z)];
    let mut r = rng(7);
    let (mut pauli_err, mut gate_err, mut cz_err, mut trace_err, mut ham_err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for l in 1..=4usize {
        let dim = 1 << l;
        let amps = random_amplitudes(dim, &mut r);
        let state = StateVector::from_amplitudes(l, amps.clone()).unwrap();

        for code in 0..4usize.pow(l as u32) {
            let factors: Vec<(usize, Axis)> = (0..l)
                .filter_map(|s| axes[(code / 4usize.pow(s as u32)) % 4].map(|a| (s, a)))
                .collect();
            let oracle = pauli_string(l, &factors);
            let dense = PauliString::new(&factors).unwrap().to_dense(l).unwrap();
            pauli_err = pauli_err.max(max_diff(dense.matrix(), &oracle));
            let applied = apply_pauli_string(&factors, &state).unwrap();
            pauli_err = pauli_err.max(vec_diff(applied.amplitudes(), &apply(&oracle, &amps)));
        }

        for site in 0..l {
            for gate in [Gate::SqrtX, Gate::SqrtY, Gate::T, Gate::Hadamard] {
                let mut v = amps.clone();
                apply_single_site(&mut v, site, &gate.matrix());
                let oracle = embed(l, &[(site, mat2(gate.matrix()))]);
                gate_err = gate_err.max(vec_diff(&v, &apply(&oracle, &amps)));
            }
            for other in (0..l).filter(|&o| o != site) {
                let mut v = amps.clone();
                apply_cz(&mut v, site, other);
                cz_err = cz_err.max(vec_diff(&v, &apply(&cz(l, site, other), &amps)));
            }
        }

        let mut out = vec![c(0.0, 0.0); dim];
        add_transverse_sum(&amps, &mut out, l);
        let x_sum = (0..l).fold(Mat::<C64>::zeros(dim, dim), |acc, s| acc + pauli_string(l, &[(s, Axis::X)]));
        ham_err = ham_err.max(vec_diff(&out, &apply(&x_sum, &amps)));

        for mask in 1..dim - 1 {
            let keep: Vec<usize> = (0..l).filter(|s| mask >> s & 1 == 1).collect();
            let sub = SubsystemChoice::new(&keep, l).unwrap();
            let rho = reduced_density_matrix(&state, &sub).unwrap();
            trace_err = trace_err.max(max_diff(rho.matrix(), &partial_trace(&amps, l, &keep)));
        }

        if l >= 2 {
            let spec = chain(l, 6.0, 3.0, 11);
            let disorder = fpl_core::draw_disorder(&spec, 0);
            let parts = chain_parts(&spec, &disorder);
            for t in [0.0, 0.17, 0.6] {
                let h = build_hamiltonian(&spec, &disorder, t).unwrap();
                ham_err = ham_err.max(max_diff(h.matrix(), &hamiltonian_at(&spec, &parts, t)));
            }
        }
    }
    vec![
        ("pauli strings", pauli_err),
        ("single-qubit gates", gate_err),
        ("cz", cz_err),
        ("partial trace", trace_err),
        ("hamiltonian", ham_err),
    ]
}

/// Deviations of the closed-form Magnus terms from the quadrature oracles
/// at `L = 3`: `(|H1(t0 = 0)|, |H1(t0 ≠ 0) − oracle|, |H2 − oracle|)`.
pub fn magnus_suite() -> (f64, f64, f64) {
    use fpl_core::magnus::{magnus_h1, magnus_h2};

    let spec = SpinChainSpec::new(3, 0.8, -1.1, 5.0, 3.0, 4).unwrap();
    let disorder = fpl_core::draw_disorder(&spec, 2);
    let h1_zero = magnus_h1(&spec, &disorder, 0.0).unwrap().max_abs();
    let t0 = 0.3 * spec.period();
    let h1 = magnus_h1(&spec, &disorder, t0).unwrap();
    let h1_err = max_diff(h1.matrix(), &magnus_h1_oracle(&spec, &disorder, t0, 24));
    let h2 = magnus_h2(&spec, &disorder).unwrap();
    let h2_err = max_diff(h2.matrix(), &magnus_h2_oracle(&spec, &disorder, 20));
    (h1_zero, h1_err, h2_err)
}

/// Zeroth-order Magnus defect at `L = 5`, averaged over `n` realizations.
pub fn mean_zeroth_defect(omega: f64, n: u64) -> f64 {
    use fpl_core::magnus::{magnus_defect, MagnusOrder};

    let spec = chain(5, omega, 3.0, 31);
    let total: f64 = (0..n)
        .map(|k| {
            let disorder = fpl_core::draw_disorder(&spec, k);
            let ops = fpl_core::floquet_unitary(&spec, &disorder).unwrap();
            magnus_defect(&spec, &disorder, MagnusOrder::Zeroth, &ops.u).unwrap()
        })
        .sum();
    total / n as f64
}
