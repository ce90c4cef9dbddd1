use num_complex::Complex64 as C64;

use crate::error::{arg, Result};

/// Tolerance on `Σ|c|² − 1` for states that claim to be normalized.
pub const NORM_TOL: f64 = 1e-10;

/// Pure state of `n_sites` spin-1/2 sites in the computational basis.
///
/// Index `z` encodes the bitstring `z_{L-1} … z_0`; bit `i` belongs to
/// site `i` and a cleared bit is spin-up (`σᶻ = +1`).
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized.
    pub fn from_amplitudes(n_sites: usize, amps: Vec<C64>) -> Result<Self> {
        check_len(n_sites, amps.len())?;
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return arg(format!("state is not normalized (|ψ|² = {norm_sq})"));
        }
        Ok(Self { n_sites, amps })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(n_sites: usize, mut amps: Vec<C64>) -> Result<Self> {
        check_len(n_sites, amps.len())?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return arg("cannot normalize a zero or non-finite vector");
        }
        let inv = 1.0 / norm;
        amps.iter_mut().for_each(|a| *a *= inv);
        Ok(Self { n_sites, amps })
    }

    /// Computational basis state `|z⟩`.
    pub fn basis(n_sites: usize, z: usize) -> Result<Self> {
        let dim = dim_of(n_sites)?;
        if z >= dim {
            return arg(format!("basis index {z} out of range for {n_sites} sites"));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[z] = C64::new(1.0, 0.0);
        Ok(Self { n_sites, amps })
    }

    /// Equal-weight superposition of every basis state.
    pub fn uniform(n_sites: usize) -> Result<Self> {
        let dim = dim_of(n_sites)?;
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            n_sites,
            amps: vec![a; dim],
        })
    }

    /// Internal constructor for kernels that preserve the norm.
    pub(crate) fn from_raw(n_sites: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << n_sites);
        Self { n_sites, amps }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return arg("inner product between states of different dimension");
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Expectation value of an operator that is diagonal in the
    /// computational basis, given by its diagonal entries.
    pub fn expectation_diagonal(&self, diag: &[f64]) -> Result<f64> {
        if diag.len() != self.dim() {
            return arg("diagonal length does not match the state dimension");
        }
        Ok(self
            .amps
            .iter()
            .zip(diag)
            .map(|(a, d)| a.norm_sqr() * d)
            .sum())
    }
}

pub(crate) fn dim_of(n_sites: usize) -> Result<usize> {
    if n_sites == 0 || n_sites > 30 {
        return arg(format!("unsupported site count {n_sites}"));
    }
    Ok(1usize << n_sites)
}

fn check_len(n_sites: usize, len: usize) -> Result<()> {
    let dim = dim_of(n_sites)?;
    if len != dim {
        return arg(format!(
            "expected {dim} amplitudes for {n_sites} sites, got {len}"
        ));
    }
    Ok(())
}
