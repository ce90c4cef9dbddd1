//! Built-in sweep recipes, one per figure of the phase-diagram study.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::{
    DigitalBlock, EstimatorBlock, ExperimentConfig, GridBlock, ModelBlock, ObservablesBlock, OutputBlock,
    ProtocolBlock, SeriesBlock, SeriesPoint,
};
use crate::error::{Error, Result};

/// Cycles tracked by the KLD-versus-cycles recipes.
pub const SERIES_M_MAX: usize = 40;
/// Master seed of the built-in recipes.
pub const RECIPE_SEED: u64 = 20240901;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Recipe {
    /// Level statistics over the full `(W, ω)` grid.
    #[serde(rename = "fig2")]
    Fig2,
    /// KLD to Porter-Thomas against cycles at three phase points.
    #[serde(rename = "fig3")]
    Fig3,
    /// KLD, level statistics and anti-concentration over the grid.
    #[serde(rename = "fig4")]
    Fig4,
    /// Entanglement entropy over the grid.
    #[serde(rename = "fig5-entropy")]
    Fig5Entropy,
    /// Random-circuit baseline against the analog chain.
    #[serde(rename = "fig6-digital")]
    Fig6Digital,
}

impl Recipe {
    pub const ALL: [Recipe; 5] = [
        Recipe::Fig2,
        Recipe::Fig3,
        Recipe::Fig4,
        Recipe::Fig5Entropy,
        Recipe::Fig6Digital,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Recipe::Fig2 => "fig2",
            Recipe::Fig3 => "fig3",
            Recipe::Fig4 => "fig4",
            Recipe::Fig5Entropy => "fig5-entropy",
            Recipe::Fig6Digital => "fig6-digital",
        }
    }

    /// Full-size configuration of the recipe.
    pub fn config(self) -> ExperimentConfig {
        let mut c = base();
        match self {
            Recipe::Fig2 => {
                c.observables.level_stats = true;
            }
            Recipe::Fig3 => {
                c.grid = GridBlock {
                    w: vec![3.0, 4.0, 30.0],
                    omega: vec![8.0, 20.0],
                };
                c.observables.kld_pt = true;
                c.observables.anti_concentration = true;
                c.observables.support = true;
                c.series = Some(SeriesBlock {
                    m_max: SERIES_M_MAX,
                    points: vec![point("thermal", 3.0, 8.0), point("mbl", 30.0, 8.0), point("prethermal", 4.0, 20.0)],
                });
            }
            Recipe::Fig4 => {
                c.observables.level_stats = true;
                c.observables.kld_pt = true;
                c.observables.anti_concentration = true;
                c.observables.support = true;
            }
            Recipe::Fig5Entropy => {
                c.observables.entropy = true;
            }
            Recipe::Fig6Digital => {
                c.grid = GridBlock {
                    w: vec![3.0],
                    omega: vec![8.0],
                };
                c.observables.kld_pt = true;
                c.observables.anti_concentration = true;
                c.observables.digital_baseline = true;
                c.digital = Some(DigitalBlock {
                    layers_max: SERIES_M_MAX,
                    seeds: 500,
                });
                c.series = Some(SeriesBlock {
                    m_max: SERIES_M_MAX,
                    points: vec![point("thermal", 3.0, 8.0)],
                });
            }
        }
        c
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Recipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Recipe::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Recipe::ALL.iter().map(|r| r.name()).collect();
                Error::Config(format!("unknown recipe {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

fn point(label: &str, w: f64, omega: f64) -> SeriesPoint {
    SeriesPoint {
        label: label.into(),
        w,
        omega,
    }
}

/// 24 geometrically spaced disorder strengths in `[0.5, 30]`.
pub fn default_w_grid() -> Vec<f64> {
    let (lo, hi, n) = (0.5f64, 30.0f64, 24);
    let mut w: Vec<f64> = (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect();
    w[n - 1] = hi;
    w
}

/// 20 evenly spaced drive frequencies in `[2, 24]`.
pub fn default_omega_grid() -> Vec<f64> {
    let (lo, hi, n) = (2.0, 24.0, 20);
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn base() -> ExperimentConfig {
    ExperimentConfig {
        model: ModelBlock {
            n_sites: 9,
            j: 1.0,
            b0: 1.25,
            delta_b: -1.25,
        },
        grid: GridBlock {
            w: default_w_grid(),
            omega: default_omega_grid(),
        },
        protocol: ProtocolBlock {
            m: 10,
            realizations: 100,
            master_seed: RECIPE_SEED,
        },
        observables: ObservablesBlock::default(),
        estimator: EstimatorBlock::default(),
        output: OutputBlock::default(),
        series: None,
        digital: None,
    }
}
