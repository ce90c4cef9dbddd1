//! Driven disordered Ising chain
//!
//! `H(t) = Σ h_i σᶻ_i + J Σ σᶻ_i σᶻ_{i+1} + (B0 + δB cos ωt) Σ σˣ_i`
//!
//! with open boundaries and `h_i` uniform on `[−W/2, W/2]`. Energies are in
//! units of `J` (normally `J = 1`) and `ħ = 1`.

use std::f64::consts::TAU;

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::ops::kernels::spin;
use crate::ops::DenseOperator;

/// Largest chain handled by the dense code paths.
pub const MAX_SITES: usize = 14;

/// Static parameters of one chain plus the seed of its disorder stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinChainSpec {
    pub n_sites: usize,
    pub j: f64,
    pub b0: f64,
    pub delta_b: f64,
    pub omega: f64,
    pub w: f64,
    pub seed: u64,
}

impl SpinChainSpec {
    /// Chain with `J = 1` and the given field, drive and disorder parameters.
    pub fn new(n_sites: usize, b0: f64, delta_b: f64, omega: f64, w: f64, seed: u64) -> Result<Self> {
        let spec = Self {
            n_sites,
            j: 1.0,
            b0,
            delta_b,
            omega,
            w,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_coupling(mut self, j: f64) -> Result<Self> {
        self.j = j;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_SITES).contains(&self.n_sites) {
            return arg(format!("L must lie in 2..={MAX_SITES}, got {}", self.n_sites));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return arg(format!("omega must be positive and finite, got {}", self.omega));
        }
        if !(self.w >= 0.0 && self.w.is_finite()) {
            return arg(format!("W must be non-negative and finite, got {}", self.w));
        }
        for (name, v) in [("J", self.j), ("B0", self.b0), ("deltaB", self.delta_b)] {
            if !v.is_finite() {
                return arg(format!("{name} must be finite, got {v}"));
            }
        }
        Ok(())
    }

    /// Drive period `T = 2π/ω`.
    pub fn period(&self) -> f64 {
        TAU / self.omega
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// Transverse field `b(t) = B0 + δB cos ωt`.
    pub fn field(&self, t: f64) -> f64 {
        self.b0 + self.delta_b * (self.omega * t).cos()
    }
}

/// On-site fields `h_i` of one disorder draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderRealization {
    h: Vec<f64>,
}

impl DisorderRealization {
    pub fn new(h: Vec<f64>) -> Result<Self> {
        if h.iter().any(|x| !x.is_finite()) {
            return arg("disorder fields must be finite");
        }
        Ok(Self { h })
    }

    pub fn zeros(n_sites: usize) -> Self {
        Self { h: vec![0.0; n_sites] }
    }

    pub fn fields(&self) -> &[f64] {
        &self.h
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

/// Realization `index` of the disorder stream keyed by `spec.seed`.
///
/// Each index owns a separate ChaCha stream, so any realization can be drawn
/// without generating the ones before it.
pub fn draw_disorder(spec: &SpinChainSpec, index: u64) -> DisorderRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    let h = (0..spec.n_sites)
        .map(|_| spec.w * (rng.random::<f64>() - 0.5))
        .collect();
    DisorderRealization { h }
}

/// Seed for grid cell `cell` derived from a sweep-wide master seed.
pub fn cell_seed(master_seed: u64, cell: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(cell);
    rng.next_u64()
}

fn check_disorder(spec: &SpinChainSpec, disorder: &DisorderRealization) -> Result<()> {
    spec.validate()?;
    if disorder.len() != spec.n_sites {
        return arg(format!(
            "disorder has {} fields for {} sites",
            disorder.len(),
            spec.n_sites
        ));
    }
    Ok(())
}

/// Diagonal of the σᶻ part, `Σ h_i s_i + J Σ s_i s_{i+1}` for each basis state.
pub fn diagonal_energies(spec: &SpinChainSpec, disorder: &DisorderRealization) -> Result<Vec<f64>> {
    check_disorder(spec, disorder)?;
    let l = spec.n_sites;
    let h = disorder.fields();
    Ok((0..spec.dim())
        .map(|z| {
            let onsite: f64 = h.iter().enumerate().map(|(i, hi)| hi * spin(z, i)).sum();
            let bonds: f64 = (0..l - 1).map(|i| spin(z, i) * spin(z, i + 1)).sum();
            onsite + spec.j * bonds
        })
        .collect())
}

fn with_transverse(diag: &[f64], n_sites: usize, coeff: f64) -> Mat<C64> {
    let dim = diag.len();
    let mut m = Mat::<C64>::zeros(dim, dim);
    for (z, &d) in diag.iter().enumerate() {
        m[(z, z)] = C64::new(d, 0.0);
        if coeff != 0.0 {
            for i in 0..n_sites {
                m[(z ^ (1 << i), z)] += C64::new(coeff, 0.0);
            }
        }
    }
    m
}

/// Static Hamiltonian `H0 = Σ h_i σᶻ_i + B0 Σ σˣ_i + J Σ σᶻ_i σᶻ_{i+1}`.
pub fn build_h0(spec: &SpinChainSpec, disorder: &DisorderRealization) -> Result<DenseOperator> {
    let diag = diagonal_energies(spec, disorder)?;
    DenseOperator::hermitian(with_transverse(&diag, spec.n_sites, spec.b0))
}

/// Drive term `δB cos(ωt) Σ σˣ_i`.
pub fn build_drive(spec: &SpinChainSpec, t: f64) -> Result<DenseOperator> {
    spec.validate()?;
    let coeff = spec.delta_b * (spec.omega * t).cos();
    let diag = vec![0.0; spec.dim()];
    DenseOperator::hermitian(with_transverse(&diag, spec.n_sites, coeff))
}

/// Full `H(t) = H0 + H_d(t)`.
pub fn build_hamiltonian(spec: &SpinChainSpec, disorder: &DisorderRealization, t: f64) -> Result<DenseOperator> {
    let diag = diagonal_energies(spec, disorder)?;
    DenseOperator::hermitian(with_transverse(&diag, spec.n_sites, spec.field(t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(l: usize, w: f64) -> SpinChainSpec {
        SpinChainSpec::new(l, 1.25, -1.25, 8.0, w, 7).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SpinChainSpec::new(1, 0.0, 0.0, 1.0, 0.0, 0).is_err());
        assert!(SpinChainSpec::new(3, 0.0, 0.0, 0.0, 0.0, 0).is_err());
        assert!(SpinChainSpec::new(3, 0.0, 0.0, 1.0, -1.0, 0).is_err());
        assert!(SpinChainSpec::new(3, f64::NAN, 0.0, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn zero_width_gives_zero_fields() {
        let d = draw_disorder(&spec(5, 0.0), 3);
        assert!(d.fields().iter().all(|&h| h == 0.0));
    }

    #[test]
    fn disorder_is_reproducible_and_bounded() {
        let s = spec(9, 4.0);
        assert_eq!(draw_disorder(&s, 11), draw_disorder(&s, 11));
        assert_ne!(draw_disorder(&s, 11), draw_disorder(&s, 12));
        for k in 0..50 {
            assert!(draw_disorder(&s, k).fields().iter().all(|h| h.abs() <= 2.0));
        }
    }

    #[test]
    fn classical_pair() {
        let s = SpinChainSpec::new(2, 0.0, 0.0, 1.0, 0.0, 0).unwrap();
        let h0 = build_h0(&s, &DisorderRealization::zeros(2)).unwrap();
        let diag: Vec<f64> = (0..4).map(|z| h0.get(z, z).re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn non_interacting_diagonal() {
        let w = 2.0;
        let s = SpinChainSpec::new(2, 0.0, 0.0, 1.0, w, 0)
            .unwrap()
            .with_coupling(0.0)
            .unwrap();
        let d = DisorderRealization::new(vec![w / 2.0, -w / 2.0]).unwrap();
        let h0 = build_h0(&s, &d).unwrap();
        let diag: Vec<f64> = (0..4).map(|z| h0.get(z, z).re).collect();
        assert_eq!(diag, vec![0.0, -w, w, 0.0]);
    }

    #[test]
    fn drive_vanishes_at_quarter_period() {
        let s = spec(3, 1.0);
        let hd = build_drive(&s, s.period() / 4.0).unwrap();
        assert!(hd.max_abs() < 1e-15);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(build_h0(&spec(3, 1.0), &DisorderRealization::zeros(2)).is_err());
    }
}
