//! Eigenphase level-spacing ratios and their random-matrix references.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::ops::{eig_unitary, wrap_phase, DenseUnitary};
use crate::stats::{kl_divergence, UniformHistogram};

/// Default number of equal bins on `[0, 1]` for r histograms.
pub const R_BINS: usize = 50;
/// Gaps below this are treated as exact degeneracies.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Where a set of phases came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseSource {
    /// Eigenphases of the driven one-period unitary.
    Floquet,
    /// Eigenphases of `exp(−iH0T)`.
    Static,
    /// Energies of a Hamiltonian multiplied by the period.
    Hamiltonian,
}

/// Sorted phases on the unit circle, each in `[0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenphaseSet {
    phases: Vec<f64>,
    source: PhaseSource,
}

impl EigenphaseSet {
    /// Wraps arbitrary angles into `[0, 2π)` and sorts them.
    pub fn new(phases: impl IntoIterator<Item = f64>, source: PhaseSource) -> Result<Self> {
        let mut phases: Vec<f64> = phases.into_iter().collect();
        if phases.iter().any(|p| !p.is_finite()) {
            return arg("phases must be finite");
        }
        phases.iter_mut().for_each(|p| *p = wrap_phase(*p));
        phases.sort_by(f64::total_cmp);
        Ok(Self { phases, source })
    }

    pub fn from_unitary(u: &DenseUnitary, source: PhaseSource) -> Result<Self> {
        let eig = eig_unitary(u)?;
        Ok(Self {
            phases: eig.phases,
            source,
        })
    }

    /// Phases `−ε_n T mod 2π` of `exp(−iHT)` for energies `ε_n`.
    pub fn from_energies(energies: &[f64], period: f64) -> Result<Self> {
        Self::new(energies.iter().map(|e| -e * period), PhaseSource::Hamiltonian)
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn source(&self) -> PhaseSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

/// Ratios of consecutive circular gaps.
#[derive(Clone, Debug, PartialEq)]
pub struct RStatistics {
    /// `r_n` for `n = 0..N`, pairing gap `n` with gap `n + 1 mod N`.
    pub r_values: Vec<f64>,
    pub mean_r: f64,
    pub histogram: UniformHistogram,
    /// Indices whose two gaps were both below [`DEGENERACY_TOL`].
    pub degenerate: Vec<usize>,
}

/// Circular gaps `θ_{n+1} − θ_n`, closing with `θ_0 + 2π − θ_{N−1}`.
pub fn circular_gaps(phases: &[f64]) -> Vec<f64> {
    let n = phases.len();
    (0..n)
        .map(|k| {
            if k + 1 < n {
                phases[k + 1] - phases[k]
            } else {
                phases[0] + TAU - phases[n - 1]
            }
        })
        .collect()
}

pub fn r_statistics(set: &EigenphaseSet) -> Result<RStatistics> {
    r_statistics_with_bins(set, R_BINS)
}

pub fn r_statistics_with_bins(set: &EigenphaseSet, bins: usize) -> Result<RStatistics> {
    let n = set.len();
    if n < 3 {
        return arg(format!("need at least 3 phases, got {n}"));
    }
    let gaps = circular_gaps(set.phases());
    let mut histogram = UniformHistogram::new(0.0, 1.0, bins)?;
    let mut degenerate = Vec::new();
    let mut r_values = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b) = (gaps[k], gaps[(k + 1) % n]);
        let r = if a < DEGENERACY_TOL && b < DEGENERACY_TOL {
            degenerate.push(k);
            0.0
        } else {
            (a.min(b) / a.max(b)).clamp(0.0, 1.0)
        };
        histogram.add(r)?;
        r_values.push(r);
    }
    let mean_r = r_values.iter().sum::<f64>() / n as f64;
    Ok(RStatistics {
        r_values,
        mean_r,
        histogram,
        degenerate,
    })
}

/// Reference spectral ensembles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ensemble {
    /// Circular orthogonal ensemble.
    Coe,
    /// Uncorrelated (Poisson) levels.
    Poisson,
    /// Gaussian orthogonal ensemble, Wigner-like surmise.
    Goe,
}

impl Ensemble {
    pub const ALL: [Ensemble; 3] = [Ensemble::Coe, Ensemble::Poisson, Ensemble::Goe];

    pub fn label(self) -> &'static str {
        match self {
            Ensemble::Coe => "coe",
            Ensemble::Poisson => "poi",
            Ensemble::Goe => "goe",
        }
    }
}

/// Below this `r` the COE density is evaluated from its Taylor series,
/// avoiding the cancellation between the `1/r²` and `1/r` terms.
const COE_SERIES_BELOW: f64 = 1e-3;
const COE_SERIES: [f64; 4] = [
    7.4396483565238743,
    -11.159472534785811,
    -19.755046765708673,
    111.2796671540269,
];

fn coe_density(r: f64) -> f64 {
    if r < COE_SERIES_BELOW {
        return COE_SERIES.iter().rev().fold(0.0, |acc, c| acc * r + c) * r;
    }
    let s = r + 1.0;
    let a = 2.0 * PI * r / s;
    let b = 2.0 * PI / s;
    (2.0 / 3.0)
        * (a.sin() / (2.0 * PI * r * r) + 1.0 / (s * s) + b.sin() / (2.0 * PI) - b.cos() / s - a.cos() / (r * s))
}

/// Density of the ratio `r ∈ [0, 1]` for a reference ensemble.
pub fn reference_density(ensemble: Ensemble, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return arg(format!("r = {r} outside [0, 1]"));
    }
    Ok(density_unchecked(ensemble, r))
}

fn density_unchecked(ensemble: Ensemble, r: f64) -> f64 {
    match ensemble {
        Ensemble::Coe => coe_density(r),
        Ensemble::Poisson => 2.0 / (1.0 + r).powi(2),
        Ensemble::Goe => 6.75 * (r + r * r) / (1.0 + r + r * r).powf(2.5),
    }
}

const QUAD_TOL: f64 = 1e-12;

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    let out = quadrature::integrate(f, a, b, QUAD_TOL);
    if !out.integral.is_finite() || out.error_estimate > 1e-9 {
        return Err(Error::Numerical(format!(
            "quadrature on [{a}, {b}] did not converge (error estimate {:.2e})",
            out.error_estimate
        )));
    }
    Ok(out.integral)
}

/// `∫₀¹ r Pr(r) dr`.
pub fn reference_mean(ensemble: Ensemble) -> Result<f64> {
    integrate(|r| r * density_unchecked(ensemble, r), 0.0, 1.0)
}

/// `∫₀¹ Pr(r) dr`, which should be one.
pub fn reference_norm(ensemble: Ensemble) -> Result<f64> {
    integrate(|r| density_unchecked(ensemble, r), 0.0, 1.0)
}

/// Probability mass of each `(lo, hi)` bin under the reference density.
pub fn reference_bin_masses(ensemble: Ensemble, edges: &[(f64, f64)]) -> Result<Vec<f64>> {
    edges
        .iter()
        .map(|&(lo, hi)| {
            if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                return arg(format!("bin [{lo}, {hi}] outside [0, 1]"));
            }
            integrate(|r| density_unchecked(ensemble, r), lo, hi)
        })
        .collect()
}

/// KLD of an r histogram to a reference ensemble, natural log.
pub fn kld_to_reference(histogram: &UniformHistogram, ensemble: Ensemble) -> Result<f64> {
    let reference = reference_bin_masses(ensemble, &histogram.edges())?;
    kl_divergence(&histogram.masses(), &reference)
}
