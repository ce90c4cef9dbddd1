//! Output probabilities of evolved states, their Porter-Thomas comparison,
//! anti-concentration and support size, and an exact bitstring sampler.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::ops::StateVector;
use crate::stats::kl_divergence;

/// Lower edge of the log-spaced `N·p` histogram.
pub const SCALED_LO: f64 = 1e-6;
/// Upper edge of the log-spaced `N·p` histogram.
pub const SCALED_HI: f64 = 50.0;
/// Number of log-spaced bins between the two edges.
pub const SCALED_BINS: usize = 60;

/// `p(z) = |⟨z|ψ⟩|²` after `m` cycles.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputDistribution {
    probabilities: Vec<f64>,
    m: usize,
}

impl OutputDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn cycles(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.probabilities.len()
    }

    /// `N·p(z)` for every basis state.
    pub fn scaled(&self) -> Vec<f64> {
        let n = self.dim() as f64;
        self.probabilities.iter().map(|p| n * p).collect()
    }
}

pub fn output_distribution(state: &StateVector, m: usize) -> OutputDistribution {
    OutputDistribution {
        probabilities: state.amplitudes().iter().map(|a| a.norm_sqr()).collect(),
        m,
    }
}

/// Porter-Thomas density `N e^{−Np}`.
pub fn pt_density(p: f64, n: usize) -> f64 {
    let n = n as f64;
    n * (-n * p).exp()
}

/// Counts of `x = N·p` over log-spaced bins, with an underflow bin `[0, lo)`
/// and an overflow bin `[hi, ∞)`. Every basis state adds one count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityHistogram {
    edges: Vec<f64>,
    /// `[underflow, bins…, overflow]`.
    counts: Vec<u64>,
}

impl ProbabilityHistogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) || bins == 0 {
            return arg(format!("invalid log-spaced range [{lo}, {hi}] with {bins} bins"));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let mut edges: Vec<f64> = (0..=bins)
            .map(|k| (a + (b - a) * k as f64 / bins as f64).exp())
            .collect();
        edges[0] = lo;
        edges[bins] = hi;
        Ok(Self {
            edges,
            counts: vec![0; bins + 2],
        })
    }

    /// `[1e-6, 50]` with 60 bins.
    pub fn scaled_default() -> Self {
        Self::new(SCALED_LO, SCALED_HI, SCALED_BINS).expect("default binning is valid")
    }

    /// Inner bin edges, `bins + 1` values.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(lo, hi)` of every stored bin including under- and overflow.
    pub fn bin_ranges(&self) -> Vec<(f64, f64)> {
        let n = self.edges.len();
        std::iter::once((0.0, self.edges[0]))
            .chain(self.edges.windows(2).map(|w| (w[0], w[1])))
            .chain(std::iter::once((self.edges[n - 1], f64::INFINITY)))
            .collect()
    }

    pub fn add_value(&mut self, x: f64) {
        let n = self.edges.len();
        let slot = if x < self.edges[0] {
            0
        } else if x >= self.edges[n - 1] {
            n
        } else {
            self.edges.partition_point(|&e| e <= x)
        };
        self.counts[slot] += 1;
    }

    pub fn add(&mut self, dist: &OutputDistribution) {
        let n = dist.dim() as f64;
        for &p in dist.probabilities() {
            self.add_value(n * p);
        }
    }

    pub fn merge(&mut self, other: &ProbabilityHistogram) -> Result<()> {
        if self.edges != other.edges {
            return arg("cannot merge histograms with different edges");
        }
        self.counts.iter_mut().zip(&other.counts).for_each(|(a, b)| *a += b);
        Ok(())
    }

    /// Fraction of all counts in every stored bin.
    pub fn masses(&self) -> Vec<f64> {
        let total = self.total();
        if total == 0 {
            return vec![0.0; self.counts.len()];
        }
        self.counts.iter().map(|&c| c as f64 / total as f64).collect()
    }

    /// Porter-Thomas mass `e^{−lo} − e^{−hi}` of every stored bin.
    pub fn pt_masses(&self) -> Vec<f64> {
        self.bin_ranges()
            .into_iter()
            .map(|(lo, hi)| {
                if hi.is_infinite() {
                    (-lo).exp()
                } else {
                    -(-lo).exp() * (lo - hi).exp_m1()
                }
            })
            .collect()
    }
}

/// KLD of the binned `N·p` distribution to Porter-Thomas, natural log.
/// `+∞` when counts fall where Porter-Thomas has no mass.
pub fn kld_to_pt(hist: &ProbabilityHistogram) -> Result<f64> {
    if hist.total() == 0 {
        return arg("histogram is empty");
    }
    kl_divergence(&hist.masses(), &hist.pt_masses())
}

/// Fraction of basis states with `p > δ/N`.
pub fn anti_concentration_fraction(dist: &OutputDistribution, delta: f64) -> f64 {
    let n = dist.dim() as f64;
    let cut = delta / n;
    dist.probabilities().iter().filter(|&&p| p > cut).count() as f64 / n
}

/// Number of basis states with `p` above `threshold`, by default `1/N²`.
pub fn support_size(dist: &OutputDistribution, threshold: Option<f64>) -> usize {
    let n = dist.dim() as f64;
    let cut = threshold.unwrap_or(1.0 / (n * n));
    dist.probabilities().iter().filter(|&&p| p > cut).count()
}

/// Bitstrings drawn from an output distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct BitstringSample {
    pub samples: Vec<usize>,
    /// `½ Σ_z |f(z) − p(z)|` between sample frequencies and `p`.
    pub tv_distance: f64,
}

/// `count` i.i.d. draws by inversion of the cumulative distribution.
pub fn sample_bitstrings(dist: &OutputDistribution, count: usize, seed: u64) -> Result<BitstringSample> {
    if count == 0 {
        return arg("sample count must be at least 1");
    }
    let cumulative: Vec<f64> = dist
        .probabilities()
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let total = *cumulative.last().expect("distributions are non-empty");
    let last = dist.dim() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<usize> = (0..count)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            cumulative.partition_point(|&c| c <= u).min(last)
        })
        .collect();
    let mut freq = vec![0.0; dist.dim()];
    for &z in &samples {
        freq[z] += 1.0 / count as f64;
    }
    let tv_distance = 0.5 * freq.iter().zip(dist.probabilities()).map(|(f, p)| (f - p).abs()).sum::<f64>();
    Ok(BitstringSample { samples, tv_distance })
}
