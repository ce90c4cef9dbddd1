//! Small shared statistics: moments, uniform histograms and the binned
//! Kullback-Leibler divergence.

use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};

/// Arithmetic mean; `NaN` for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation; `NaN` for an empty slice.
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    if xs.is_empty() {
        return f64::NAN;
    }
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// `Σ q_b ln(q_b / p_b)` over paired bin masses.
///
/// Bins with `q_b = 0` contribute nothing, `q_b > 0` on `p_b = 0` gives
/// `+∞`, and totals in `[−1e-12, 0)` are clamped to zero. Larger negative
/// totals are returned unchanged since they signal masses that do not sum
/// to the same value.
pub fn kl_divergence(q: &[f64], p: &[f64]) -> Result<f64> {
    if q.len() != p.len() {
        return arg(format!("mass vectors differ in length ({} vs {})", q.len(), p.len()));
    }
    let mut total = 0.0;
    for (&qb, &pb) in q.iter().zip(p) {
        if qb < 0.0 || pb < 0.0 || !qb.is_finite() || !pb.is_finite() {
            return arg("bin masses must be finite and non-negative");
        }
        if qb == 0.0 {
            continue;
        }
        if pb == 0.0 {
            return Ok(f64::INFINITY);
        }
        total += qb * (qb / pb).ln();
    }
    Ok(if (-1e-12..0.0).contains(&total) { 0.0 } else { total })
}

/// Equal-width histogram of counts on `[lo, hi]`; the right edge belongs
/// to the last bin and values outside the range are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformHistogram {
    lo: f64,
    hi: f64,
    counts: Vec<u64>,
}

impl UniformHistogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return arg(format!("invalid histogram range [{lo}, {hi}] with {bins} bins"));
        }
        Ok(Self {
            lo,
            hi,
            counts: vec![0; bins],
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    /// `(lo, hi)` of every bin.
    pub fn edges(&self) -> Vec<(f64, f64)> {
        let w = self.width();
        (0..self.bins())
            .map(|b| (self.lo + b as f64 * w, if b + 1 == self.bins() { self.hi } else { self.lo + (b + 1) as f64 * w }))
            .collect()
    }

    pub fn add(&mut self, x: f64) -> Result<()> {
        if !(x >= self.lo && x <= self.hi) {
            return arg(format!("value {x} outside [{}, {}]", self.lo, self.hi));
        }
        let b = (((x - self.lo) / self.width()) as usize).min(self.bins() - 1);
        self.counts[b] += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &UniformHistogram) -> Result<()> {
        if self.lo != other.lo || self.hi != other.hi || self.bins() != other.bins() {
            return arg("cannot merge histograms with different binning");
        }
        self.counts.iter_mut().zip(&other.counts).for_each(|(a, b)| *a += b);
        Ok(())
    }

    /// Fraction of all counts in each bin.
    pub fn masses(&self) -> Vec<f64> {
        let total = self.total();
        if total == 0 {
            return vec![0.0; self.bins()];
        }
        self.counts.iter().map(|&c| c as f64 / total as f64).collect()
    }

    /// Masses divided by the bin width, so the histogram integrates to one.
    pub fn density(&self) -> Vec<f64> {
        let w = self.width();
        self.masses().into_iter().map(|m| m / w).collect()
    }
}
