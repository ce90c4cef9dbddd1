//! One-period Floquet unitary, the undriven comparator and stroboscopic
//! evolution.
//!
//! The time-ordered exponential is integrated column by column with a
//! Taylor-series stepper for `iψ' = (D + b(t)X)ψ`, where `D` is the diagonal
//! σᶻ part and `X = Σσˣ`. Derivatives of `b(t) = B0 + δB cos ωt` are known in
//! closed form, so the series coefficients follow from the recurrence
//!
//! `a_{n+1} = −i/(n+1) [D a_n + X Σ_k b^{(k)}(t)/k! a_{n−k}]`
//!
//! and each step is summed until the terms drop below double precision.
//! Because `H(t)` is real symmetric and `H(T − t) = H(t)`, only the first half
//! period is integrated: with `M = U(T/2, 0)` the full period is `U = Mᵀ M`.
//!
//! Every result is certified by re-integrating a fixed, evenly spaced set of
//! columns of `M` with twice as many steps (all columns up to `L = 6`) and
//! recording `2 max_j ‖ΔM e_j‖`, which bounds the induced change of `U`
//! column by column to first order.

use std::f64::consts::FRAC_PI_2;

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::model::{build_h0, build_hamiltonian, diagonal_energies, DisorderRealization, SpinChainSpec};
use crate::ops::kernels::add_transverse_sum;
use crate::ops::{hermitian_eigen, matvec, DenseOperator, DenseUnitary, StateVector};

/// Largest `h · ‖H‖` allowed for a single Taylor step.
const STEP_NORM: f64 = 6.0;
/// Largest `h · ω` allowed, which keeps the drive's Taylor series short.
const STEP_PHASE: f64 = 1.5;
/// Number of half-period columns re-integrated with doubled steps.
const CERTIFY_COLUMNS: usize = 64;
/// Highest Taylor order before a step is declared non-convergent.
const MAX_ORDER: usize = 96;
/// Terms below this magnitude end the series.
const TERM_CUTOFF: f64 = 1e-17;
/// Consecutive negligible terms that end a series. `b`, `b'` and `b''` cannot
/// vanish together unless the field is identically zero, so at most two
/// leading orders can be exactly zero.
const STOP_RUN: usize = 3;
/// Field-series products below this size are dropped from the convolution.
const CONVOLUTION_CUTOFF: f64 = 1e-19;

/// Knobs of the certified integrator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorConfig {
    /// Required self-convergence defect.
    pub tolerance: f64,
    /// Ceiling on the number of steps per period.
    pub max_slices: usize,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_slices: 1 << 16,
        }
    }
}

/// Driven and undriven one-period unitaries of one disorder realization.
#[derive(Clone, Debug)]
pub struct FloquetOperators {
    pub u: DenseUnitary,
    pub u0: DenseUnitary,
    /// Steps per period used for the returned `u`.
    pub slices_used: usize,
    /// Self-convergence defect of `u` against a run with doubled steps.
    pub convergence_defect: f64,
}

/// Time-dependent generator in the split form `D + b(t) X`.
struct Generator<'a> {
    spec: &'a SpinChainSpec,
    diag: Vec<f64>,
    norm_bound: f64,
}

impl<'a> Generator<'a> {
    fn new(spec: &'a SpinChainSpec, disorder: &DisorderRealization) -> Result<Self> {
        let diag = diagonal_energies(spec, disorder)?;
        let d_max = diag.iter().fold(0.0f64, |a, d| a.max(d.abs()));
        let field_max = spec.b0.abs() + spec.delta_b.abs();
        let norm_bound = (d_max + field_max * spec.n_sites as f64).max(1e-3);
        Ok(Self {
            spec,
            diag,
            norm_bound,
        })
    }

    /// `b^{(k)}(t) h^k / k!` for `k = 0..MAX_ORDER`.
    fn field_series(&self, t: f64, h: f64) -> Vec<f64> {
        let (w, db) = (self.spec.omega, self.spec.delta_b);
        let mut out = Vec::with_capacity(MAX_ORDER + 1);
        let mut scale = 1.0;
        for k in 0..=MAX_ORDER {
            if k > 0 {
                scale *= w * h / k as f64;
            }
            let v = db * scale * (w * t + k as f64 * FRAC_PI_2).cos();
            out.push(if k == 0 { v + self.spec.b0 } else { v });
        }
        out
    }

    /// Advances one column over `steps` equal steps starting at `t0`.
    fn evolve_column(&self, psi: &mut [C64], t0: f64, h: f64, steps: usize) -> Result<()> {
        let dim = psi.len();
        let l = self.spec.n_sites;
        let zero = C64::new(0.0, 0.0);
        // scaled Taylor coefficients of the current step, order-major
        let mut terms = vec![zero; (MAX_ORDER + 1) * dim];
        let mut sizes = [0.0f64; MAX_ORDER + 1];
        let mut comb = vec![zero; dim];
        for s in 0..steps {
            let beta = self.field_series(t0 + s as f64 * h, h);
            terms[..dim].copy_from_slice(psi);
            sizes[0] = psi.iter().fold(0.0f64, |a, x| a.max(x.norm()));
            let mut small_run = 0;
            let mut converged = false;
            for n in 0..MAX_ORDER {
                comb.fill(zero);
                for k in 0..=n {
                    let bk = beta[k];
                    if (bk * sizes[n - k]).abs() < CONVOLUTION_CUTOFF {
                        continue;
                    }
                    let src = &terms[(n - k) * dim..(n - k + 1) * dim];
                    for (c, &a) in comb.iter_mut().zip(src) {
                        *c += bk * a;
                    }
                }
                let (done, rest) = terms.split_at_mut((n + 1) * dim);
                let current = &done[n * dim..];
                let next = &mut rest[..dim];
                for ((x, &a), &d) in next.iter_mut().zip(current).zip(&self.diag) {
                    *x = a * d;
                }
                add_transverse_sum(&comb, next, l);
                let factor = C64::new(0.0, -h / (n + 1) as f64);
                let mut largest = 0.0f64;
                for (x, p) in next.iter_mut().zip(psi.iter_mut()) {
                    *x *= factor;
                    *p += *x;
                    largest = largest.max(x.norm_sqr());
                }
                let largest = largest.sqrt();
                sizes[n + 1] = largest;
                if largest < TERM_CUTOFF {
                    small_run += 1;
                    if small_run == STOP_RUN {
                        converged = true;
                        break;
                    }
                } else {
                    small_run = 0;
                }
            }
            if !converged {
                return Err(Error::Numerical(format!(
                    "Taylor series did not converge within {MAX_ORDER} orders"
                )));
            }
        }
        Ok(())
    }

    /// Propagator from `t0` to `t1` in `steps` steps, columns in parallel.
    fn propagate(&self, t0: f64, t1: f64, steps: usize) -> Result<Mat<C64>> {
        let dim = self.diag.len();
        let all: Vec<usize> = (0..dim).collect();
        let cols = self.propagate_columns(t0, t1, steps, &all)?;
        Ok(Mat::from_fn(dim, dim, |i, j| cols[j * dim + i]))
    }

    /// Selected columns of the propagator, concatenated.
    fn propagate_columns(&self, t0: f64, t1: f64, steps: usize, which: &[usize]) -> Result<Vec<C64>> {
        let dim = self.diag.len();
        let h = (t1 - t0) / steps as f64;
        let mut cols = vec![C64::new(0.0, 0.0); dim * which.len()];
        cols.par_chunks_mut(dim).zip(which.par_iter()).try_for_each(|(col, &j)| {
            col[j] = C64::new(1.0, 0.0);
            self.evolve_column(col, t0, h, steps)
        })?;
        Ok(cols)
    }

    fn min_steps(&self, duration: f64) -> usize {
        let by_norm = duration.abs() * self.norm_bound / STEP_NORM;
        let by_phase = duration.abs() * self.spec.omega / STEP_PHASE;
        (by_norm.max(by_phase).ceil() as usize).max(1)
    }
}

/// Certified one-period unitary `U` together with `U0 = exp(−iH0T)`.
pub fn floquet_unitary(spec: &SpinChainSpec, disorder: &DisorderRealization) -> Result<FloquetOperators> {
    floquet_unitary_with(spec, disorder, &PropagatorConfig::default())
}

pub fn floquet_unitary_with(
    spec: &SpinChainSpec,
    disorder: &DisorderRealization,
    config: &PropagatorConfig,
) -> Result<FloquetOperators> {
    let gen = Generator::new(spec, disorder)?;
    let half = 0.5 * spec.period();
    let dim = spec.dim();
    let probes: Vec<usize> = (0..dim).step_by((dim / CERTIFY_COLUMNS).max(1)).collect();
    let mut steps = gen.min_steps(half);
    let mut history = Vec::new();
    loop {
        if 4 * steps > config.max_slices {
            return Err(Error::Convergence {
                max_slices: config.max_slices,
                history,
            });
        }
        let coarse = gen.propagate(0.0, half, steps)?;
        let fine = gen.propagate_columns(0.0, half, 2 * steps, &probes)?;
        let column_defect = probes
            .iter()
            .zip(fine.chunks_exact(dim))
            .map(|(&j, col)| {
                col.iter()
                    .enumerate()
                    .map(|(i, x)| (coarse[(i, j)] - x).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0f64, f64::max);
        // U = MᵀM, so a perturbation of M enters U at most twice
        let defect = 2.0 * column_defect;
        history.push((2 * steps, defect));
        if defect < config.tolerance {
            return Ok(FloquetOperators {
                u: DenseUnitary::new(full_period(&coarse))?,
                u0: static_unitary(spec, disorder)?,
                slices_used: 2 * steps,
                convergence_defect: defect,
            });
        }
        steps *= 2;
    }
}

fn full_period(half: &Mat<C64>) -> Mat<C64> {
    half.transpose() * half
}

/// `exp(−iH0T)` through the Hermitian eigendecomposition of `H0`.
pub fn static_unitary(spec: &SpinChainSpec, disorder: &DisorderRealization) -> Result<DenseUnitary> {
    let h0 = build_h0(spec, disorder)?;
    exp_i_hermitian(&h0, -spec.period())
}

/// `exp(i s A)` for Hermitian `A`.
pub fn exp_i_hermitian(a: &DenseOperator, s: f64) -> Result<DenseUnitary> {
    if !a.is_hermitian() {
        return arg("exponent must be Hermitian");
    }
    let eig = hermitian_eigen(a.matrix())?;
    let v = &eig.vectors;
    let n = a.dim();
    let scaled = Mat::from_fn(n, n, |i, k| v[(i, k)] * C64::from_polar(1.0, s * eig.values[k]));
    DenseUnitary::new(&scaled * v.adjoint())
}

/// Time-ordered propagator from `t0` to `t1` with the Taylor stepper; the step
/// count is chosen from the norm bound, not certified.
pub fn propagate_interval(
    spec: &SpinChainSpec,
    disorder: &DisorderRealization,
    t0: f64,
    t1: f64,
) -> Result<DenseUnitary> {
    let gen = Generator::new(spec, disorder)?;
    if !(t0.is_finite() && t1.is_finite()) {
        return arg("interval endpoints must be finite");
    }
    let steps = gen.min_steps(t1 - t0);
    DenseUnitary::new(gen.propagate(t0, t1, steps)?)
}

/// Midpoint product `∏ exp(−iH(t_k + Δt/2)Δt)` over one period with
/// `n_slices` exactly exponentiated slices. Second order in `Δt`; intended
/// as an independent check on small chains.
pub fn midpoint_unitary(
    spec: &SpinChainSpec,
    disorder: &DisorderRealization,
    n_slices: usize,
) -> Result<DenseUnitary> {
    if n_slices == 0 {
        return arg("need at least one slice");
    }
    let dt = spec.period() / n_slices as f64;
    let mut u = Mat::<C64>::identity(spec.dim(), spec.dim());
    for k in 0..n_slices {
        let h = build_hamiltonian(spec, disorder, (k as f64 + 0.5) * dt)?;
        let step = exp_i_hermitian(&h, -dt)?;
        u = step.matrix() * &u;
    }
    DenseUnitary::new(u)
}

/// All-up product state, basis index 0.
pub fn initial_state(n_sites: usize) -> Result<StateVector> {
    StateVector::basis(n_sites, 0)
}

/// `U^m |ψ⟩` by `m` matrix-vector products.
pub fn evolve(state: &StateVector, u: &DenseUnitary, m: usize) -> Result<StateVector> {
    check_dims(state, u)?;
    let mut amps = state.amplitudes().to_vec();
    for _ in 0..m {
        amps = matvec(u.matrix(), &amps);
    }
    Ok(StateVector::from_raw(state.n_sites(), amps))
}

/// States `U^k |ψ⟩` for `k = 0..=m`.
pub fn trajectory(state: &StateVector, u: &DenseUnitary, m: usize) -> Result<Vec<StateVector>> {
    check_dims(state, u)?;
    let mut out = Vec::with_capacity(m + 1);
    out.push(state.clone());
    for k in 0..m {
        let next = matvec(u.matrix(), out[k].amplitudes());
        out.push(StateVector::from_raw(state.n_sites(), next));
    }
    Ok(out)
}

fn check_dims(state: &StateVector, u: &DenseUnitary) -> Result<()> {
    if state.dim() != u.dim() {
        return arg(format!(
            "state dimension {} does not match unitary dimension {}",
            state.dim(),
            u.dim()
        ));
    }
    Ok(())
}
