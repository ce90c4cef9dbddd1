//! Sweep configuration, read from TOML.
//!
//! ```toml
//! [model]
//! L = 9
//! J = 1.0
//! B0 = 1.25
//! deltaB = -1.25
//!
//! [grid]
//! W = [3.0, 30.0]
//! omega = [8.0]
//!
//! [protocol]
//! m = 10
//! realizations = 100
//! master_seed = 2024
//!
//! [observables]
//! level_stats = true
//! kld_pt = true
//!
//! [output]
//! directory = "out"
//! ```
//!
//! Unlisted observables are off. The optional `[series]` block records the
//! pooled KLD to Porter-Thomas at every cycle count up to `m_max` for named
//! grid points, and `[digital]` sets up the random-circuit baseline.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuits::CzSchedule;
use crate::error::{Error, Result};
use crate::model::{SpinChainSpec, MAX_SITES};
use crate::sampling::{SCALED_BINS, SCALED_HI, SCALED_LO};
use crate::spectra::R_BINS;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelBlock,
    pub grid: GridBlock,
    pub protocol: ProtocolBlock,
    #[serde(default)]
    pub observables: ObservablesBlock,
    #[serde(default)]
    pub estimator: EstimatorBlock,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digital: Option<DigitalBlock>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    #[serde(rename = "L")]
    pub n_sites: usize,
    #[serde(rename = "J", default = "unit")]
    pub j: f64,
    #[serde(rename = "B0")]
    pub b0: f64,
    #[serde(rename = "deltaB")]
    pub delta_b: f64,
}

fn unit() -> f64 {
    1.0
}

/// Disorder strengths and drive frequencies, both in units of `J` and both
/// strictly ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    #[serde(rename = "W")]
    pub w: Vec<f64>,
    pub omega: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolBlock {
    /// Drive cycles before the output distribution is read.
    pub m: usize,
    /// Disorder realizations per grid cell.
    pub realizations: usize,
    pub master_seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObservablesBlock {
    pub level_stats: bool,
    pub kld_pt: bool,
    pub entropy: bool,
    pub support: bool,
    pub anti_concentration: bool,
    pub magnus_defect: bool,
    pub digital_baseline: bool,
}

impl ObservablesBlock {
    /// Observables that read the state after `m` cycles.
    pub fn needs_state(&self) -> bool {
        self.kld_pt || self.entropy || self.support || self.anti_concentration
    }

    pub fn needs_unitary(&self) -> bool {
        self.level_stats || self.magnus_defect || self.needs_state()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorBlock {
    pub r_bins: usize,
    pub np_lo: f64,
    pub np_hi: f64,
    pub np_bins: usize,
    /// `δ` in the anti-concentration fraction `p > δ/N`.
    pub anticonc_delta: f64,
    /// Support threshold; `1/N²` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_threshold: Option<f64>,
    pub subsystems: usize,
    pub subsystem_size: usize,
    pub contiguous_subsystems: bool,
    pub cz_schedule: CzSchedule,
}

impl Default for EstimatorBlock {
    fn default() -> Self {
        Self {
            r_bins: R_BINS,
            np_lo: SCALED_LO,
            np_hi: SCALED_HI,
            np_bins: SCALED_BINS,
            anticonc_delta: 1.0,
            support_threshold: None,
            subsystems: 6,
            subsystem_size: 3,
            contiguous_subsystems: false,
            cz_schedule: CzSchedule::Brickwork,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
    /// Write per-cell r and `N·p` histograms.
    pub histograms: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec![OutputFormat::Csv, OutputFormat::Json],
            histograms: true,
        }
    }
}

impl OutputBlock {
    pub fn wants(&self, format: OutputFormat) -> bool {
        self.formats.contains(&format)
    }
}

/// Grid cells whose KLD is tracked cycle by cycle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesBlock {
    pub m_max: usize,
    pub points: Vec<SeriesPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesPoint {
    pub label: String,
    #[serde(rename = "W")]
    pub w: f64,
    pub omega: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DigitalBlock {
    pub layers_max: usize,
    /// Independent circuits pooled into each histogram.
    pub seeds: usize,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

fn merge_tables(base: &mut toml::Table, top: toml::Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) => merge_tables(b, t),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

fn strictly_ascending(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Config from `text` with every key it leaves out taken from `base`.
    pub fn overlay(base: &ExperimentConfig, text: &str) -> Result<Self> {
        let mut table = toml::Table::try_from(base).map_err(|e| Error::Config(e.to_string()))?;
        let top: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        merge_tables(&mut table, top);
        let config: Self = table.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        if !(2..=MAX_SITES).contains(&m.n_sites) {
            return invalid(format!("model.L must lie in 2..={MAX_SITES}, got {}", m.n_sites));
        }
        for (name, v) in [("model.J", m.j), ("model.B0", m.b0), ("model.deltaB", m.delta_b)] {
            if !v.is_finite() {
                return invalid(format!("{name} must be finite"));
            }
        }
        let g = &self.grid;
        if g.w.is_empty() || g.omega.is_empty() {
            return invalid("grid.W and grid.omega must be non-empty");
        }
        if !strictly_ascending(&g.w) || !strictly_ascending(&g.omega) {
            return invalid("grid.W and grid.omega must be strictly ascending");
        }
        if g.w.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return invalid("grid.W entries must be finite and non-negative");
        }
        if g.omega.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return invalid("grid.omega entries must be finite and positive");
        }
        if self.protocol.realizations == 0 {
            return invalid("protocol.realizations must be at least 1");
        }
        let o = &self.observables;
        let e = &self.estimator;
        if o.level_stats && e.r_bins == 0 {
            return invalid("estimator.r_bins must be at least 1");
        }
        if (o.kld_pt || self.series.is_some() || o.digital_baseline)
            && !(e.np_lo > 0.0 && e.np_hi > e.np_lo && e.np_hi.is_finite() && e.np_bins > 0)
        {
            return invalid("estimator.np_lo, np_hi and np_bins must describe a positive log-spaced range");
        }
        if o.anti_concentration && !(e.anticonc_delta > 0.0 && e.anticonc_delta.is_finite()) {
            return invalid("estimator.anticonc_delta must be positive");
        }
        if let Some(t) = e.support_threshold {
            if !(t >= 0.0 && t.is_finite()) {
                return invalid("estimator.support_threshold must be non-negative");
            }
        }
        if o.entropy {
            if e.subsystem_size == 0 || e.subsystem_size >= m.n_sites {
                return invalid(format!(
                    "estimator.subsystem_size must lie in 1..{}, got {}",
                    m.n_sites, e.subsystem_size
                ));
            }
            let available = if e.contiguous_subsystems {
                (m.n_sites - e.subsystem_size + 1) as u128
            } else {
                (0..e.subsystem_size).fold(1u128, |acc, i| acc * (m.n_sites - i) as u128 / (i as u128 + 1))
            };
            if e.subsystems == 0 || e.subsystems as u128 > available {
                return invalid(format!(
                    "estimator.subsystems must lie in 1..={available} for subsystems of {} sites",
                    e.subsystem_size
                ));
            }
        }
        if let Some(series) = &self.series {
            if series.m_max == 0 || series.points.is_empty() {
                return invalid("series needs m_max >= 1 and at least one point");
            }
            for p in &series.points {
                if self.cell_of(p.w, p.omega).is_none() {
                    return invalid(format!(
                        "series point {} (W = {}, omega = {}) is not a grid cell",
                        p.label, p.w, p.omega
                    ));
                }
            }
            let mut labels: Vec<&str> = series.points.iter().map(|p| p.label.as_str()).collect();
            labels.sort_unstable();
            labels.dedup();
            if labels.len() != series.points.len() {
                return invalid("series point labels must be distinct");
            }
        }
        match (&self.digital, o.digital_baseline) {
            (None, true) => return invalid("observables.digital_baseline needs a [digital] block"),
            (Some(d), true) if d.seeds == 0 => return invalid("digital.seeds must be at least 1"),
            _ => {}
        }
        for &w in &g.w {
            for &omega in &g.omega {
                self.chain(w, omega, 0)?;
            }
        }
        Ok(())
    }

    pub fn n_cells(&self) -> usize {
        self.grid.w.len() * self.grid.omega.len()
    }

    /// `(W, ω)` of cell `index`; ω is the outer loop.
    pub fn cell_coordinates(&self, index: usize) -> (f64, f64) {
        let nw = self.grid.w.len();
        (self.grid.w[index % nw], self.grid.omega[index / nw])
    }

    /// Index of the cell at exactly `(w, omega)`.
    pub fn cell_of(&self, w: f64, omega: f64) -> Option<usize> {
        let iw = self.grid.w.iter().position(|&x| x == w)?;
        let io = self.grid.omega.iter().position(|&x| x == omega)?;
        Some(io * self.grid.w.len() + iw)
    }

    pub fn chain(&self, w: f64, omega: f64, seed: u64) -> Result<SpinChainSpec> {
        let m = &self.model;
        SpinChainSpec::new(m.n_sites, m.b0, m.delta_b, omega, w, seed)?.with_coupling(m.j)
    }

    /// Hex SHA-256 of the canonical JSON form with the output block removed.
    pub fn hash(&self) -> Result<String> {
        let mut value = serde_json::to_value(self)?;
        if let Some(map) = value.as_object_mut() {
            map.remove("output");
        }
        let canonical = serde_json::to_string(&value)?;
        Ok(hex::encode(Sha256::digest(canonical.as_bytes())))
    }
}
