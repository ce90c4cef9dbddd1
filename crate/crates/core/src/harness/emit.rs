//! Output files of a sweep.
//!
//! All floats are printed like C's `%.9g`. Files and rows are written in a
//! fixed order, so identical results give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, OutputFormat};
use super::sweep::{CellResult, RealizationProvenance, SweepResult};
use crate::circuits::matched_time_axis;
use crate::entanglement::SubsystemChoice;
use crate::error::{Error, Result};
use crate::spectra::{reference_density, Ensemble};

pub const GRID_COLUMNS: [&str; 12] = [
    "W_over_J",
    "omega_over_J",
    "mean_r",
    "std_r",
    "kld_pt",
    "kld_pt_std",
    "entropy_mean",
    "entropy_std",
    "support_mean",
    "anticonc_mean",
    "magnus_defect0",
    "n_realizations",
];
pub const HIST_COLUMNS: [&str; 3] = ["bin_lo", "bin_hi", "mass"];
pub const REFCURVE_COLUMNS: [&str; 3] = ["curve", "x", "density"];
pub const DIGITAL_COLUMNS: [&str; 4] = ["layers", "kld_pt", "kld_pt_std", "anticonc_mean"];
pub const ANALOG_DIGITAL_COLUMNS: [&str; 6] = ["W_over_J", "omega_over_J", "m", "layers", "kld_analog", "kld_digital"];
pub const R_U0_COLUMNS: [&str; 6] = ["W_over_J", "omega_over_J", "mean_r", "std_r", "mean_r_u0", "std_r_u0"];

/// Points per reference curve in `refcurves.csv`.
const REFCURVE_POINTS: usize = 201;

/// `%.9g`: nine significant digits, trailing zeros removed, exponent form
/// below `1e-4` and from `1e9` on.
pub fn format_g9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (8 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_g9).unwrap_or_default()
}

/// Creates `dir` and proves it writable before any computation starts.
pub fn preflight(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let probe = dir.join(".fpl_write_probe");
    fs::write(&probe, b"")?;
    fs::remove_file(probe)?;
    Ok(())
}

fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn grid_row(cell: &CellResult) -> Vec<String> {
    vec![
        format_g9(cell.w),
        format_g9(cell.omega),
        opt(cell.mean_r),
        opt(cell.std_r),
        opt(cell.kld_pt),
        opt(cell.kld_pt_std),
        opt(cell.entropy_mean),
        opt(cell.entropy_std),
        opt(cell.support_mean),
        opt(cell.anticonc_mean),
        opt(cell.magnus_defect0),
        cell.n_realizations.to_string(),
    ]
}

/// Histogram file name of cell `index` for quantity `kind`.
pub fn hist_file_name(index: usize, kind: &str) -> String {
    format!("hist_c{index:04}_{kind}.csv")
}

fn hist_rows(ranges: Vec<(f64, f64)>, masses: Vec<f64>) -> Vec<Vec<String>> {
    ranges
        .into_iter()
        .zip(masses)
        .map(|((lo, hi), m)| vec![format_g9(lo), format_g9(hi), format_g9(m)])
        .collect()
}

fn refcurve_rows(config: &ExperimentConfig) -> Result<Vec<Vec<String>>> {
    let mut rows = Vec::new();
    for ens in Ensemble::ALL {
        for k in 0..REFCURVE_POINTS {
            let r = k as f64 / (REFCURVE_POINTS - 1) as f64;
            rows.push(vec![
                ens.label().to_string(),
                format_g9(r),
                format_g9(reference_density(ens, r)?),
            ]);
        }
    }
    // density of x = N·p under Porter-Thomas, on the histogram's log scale
    let (a, b) = (config.estimator.np_lo.ln(), config.estimator.np_hi.ln());
    for k in 0..REFCURVE_POINTS {
        let x = (a + (b - a) * k as f64 / (REFCURVE_POINTS - 1) as f64).exp();
        rows.push(vec!["pt".to_string(), format_g9(x), format_g9((-x).exp())]);
    }
    Ok(rows)
}

/// Per-cell provenance in `run.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellProvenance {
    pub index: usize,
    #[serde(rename = "W")]
    pub w: f64,
    pub omega: f64,
    pub seed: u64,
    pub n_realizations: usize,
    pub failure: Option<String>,
    pub subsystems: Option<Vec<SubsystemChoice>>,
    pub realizations: Vec<RealizationProvenance>,
}

/// Contents of `run.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub code_version: String,
    pub failed_cells: Vec<usize>,
    pub cells: Vec<CellProvenance>,
    pub digital_seeds: Option<Vec<u64>>,
}

impl RunRecord {
    pub fn from_result(result: &SweepResult) -> Self {
        Self {
            config: result.config.clone(),
            config_hash: result.config_hash.clone(),
            code_version: result.code_version.clone(),
            failed_cells: result.failed_cells(),
            cells: result
                .cells
                .iter()
                .map(|c| CellProvenance {
                    index: c.index,
                    w: c.w,
                    omega: c.omega,
                    seed: c.seed,
                    n_realizations: c.n_realizations,
                    failure: c.failure.clone(),
                    subsystems: c.subsystems.clone(),
                    realizations: c.realizations.clone(),
                })
                .collect(),
            digital_seeds: result.digital.as_ref().map(|d| d.seeds.clone()),
        }
    }

    pub fn load(dir: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(dir.join("run.json"))?)?)
    }
}

/// Writes every artifact enabled by the output block and returns the paths
/// in the order written.
pub fn emit(result: &SweepResult, dir: &Path) -> Result<Vec<PathBuf>> {
    preflight(dir)?;
    let config = &result.config;
    let mut written = Vec::new();
    let mut put = |name: &str| {
        let p = dir.join(name);
        written.push(p.clone());
        p
    };

    if config.output.wants(OutputFormat::Csv) {
        write_csv(&put("grid.csv"), &GRID_COLUMNS, result.cells.iter().map(grid_row))?;
        write_csv(&put("refcurves.csv"), &REFCURVE_COLUMNS, refcurve_rows(config)?)?;

        if config.observables.level_stats {
            let rows = result.cells.iter().map(|c| {
                vec![
                    format_g9(c.w),
                    format_g9(c.omega),
                    opt(c.mean_r),
                    opt(c.std_r),
                    opt(c.mean_r_u0),
                    opt(c.std_r_u0),
                ]
            });
            write_csv(&put("r_u0.csv"), &R_U0_COLUMNS, rows)?;
        }

        if config.output.histograms {
            for c in &result.cells {
                if let Some(h) = &c.r_hist {
                    write_csv(&put(&hist_file_name(c.index, "r")), &HIST_COLUMNS, hist_rows(h.edges(), h.masses()))?;
                }
                if let Some(h) = &c.r_u0_hist {
                    write_csv(&put(&hist_file_name(c.index, "r_u0")), &HIST_COLUMNS, hist_rows(h.edges(), h.masses()))?;
                }
                if let Some(h) = &c.np_hist {
                    write_csv(&put(&hist_file_name(c.index, "np")), &HIST_COLUMNS, hist_rows(h.bin_ranges(), h.masses()))?;
                }
            }
        }

        if let Some(series) = &config.series {
            let columns: Vec<Vec<f64>> = series
                .points
                .iter()
                .map(|p| series_of(result, p.w, p.omega))
                .collect::<Result<_>>()?;
            let mut header = vec!["m".to_string()];
            header.extend(series.points.iter().map(|p| format!("kld_{}", p.label)));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows = (0..series.m_max).map(|i| {
                let mut row = vec![(i + 1).to_string()];
                row.extend(columns.iter().map(|col| opt(col.get(i).copied())));
                row
            });
            write_csv(&put("kld_vs_m.csv"), &header, rows)?;
        }

        if let Some(digital) = &result.digital {
            let rows = (0..digital.kld_pt.len()).map(|d| {
                vec![
                    d.to_string(),
                    format_g9(digital.kld_pt[d]),
                    format_g9(digital.kld_pt_std[d]),
                    format_g9(digital.anticonc_mean[d]),
                ]
            });
            write_csv(&put("digital.csv"), &DIGITAL_COLUMNS, rows)?;

            if let Some(series) = &config.series {
                let mut rows = Vec::new();
                for p in &series.points {
                    let analog = series_of(result, p.w, p.omega)?;
                    for (i, kld) in analog.iter().enumerate() {
                        let m = i + 1;
                        let layers = matched_time_axis(p.omega, m)?;
                        rows.push(vec![
                            format_g9(p.w),
                            format_g9(p.omega),
                            m.to_string(),
                            layers.to_string(),
                            format_g9(*kld),
                            opt(digital.kld_pt.get(layers).copied()),
                        ]);
                    }
                }
                write_csv(&put("analog_digital.csv"), &ANALOG_DIGITAL_COLUMNS, rows)?;
            }
        }
    }

    if config.output.wants(OutputFormat::Json) {
        let mut text = serde_json::to_string_pretty(&RunRecord::from_result(result))?;
        text.push('\n');
        fs::write(put("run.json"), text)?;
    }
    Ok(written)
}

/// KLD series of a series point; empty when its cell failed.
fn series_of(result: &SweepResult, w: f64, omega: f64) -> Result<Vec<f64>> {
    let cell = result
        .cell_at(w, omega)
        .ok_or_else(|| Error::Config(format!("series point (W = {w}, omega = {omega}) is not a grid cell")))?;
    Ok(cell.kld_series.clone().unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g9_matches_c_printf() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (9.9999999999, "10"),
            (0.527_0, "0.527"),
            (1e100, "1e+100"),
            (2.0f64.powi(-60), "8.67361738e-19"),
            (f64::INFINITY, "inf"),
            (f64::NAN, "nan"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g9(x), want, "formatting {x}");
        }
    }

    #[test]
    fn g9_round_trips_to_nine_digits() {
        for x in [0.3862943611198906, 0.5269216860, 12.345678912345, 7.1e-7] {
            let back: f64 = format_g9(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 5e-9);
        }
    }

    #[test]
    fn preflight_rejects_a_file_path() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("occupied");
        fs::write(&file, "x").unwrap();
        assert!(matches!(preflight(&file), Err(Error::Io(_))));
        assert!(preflight(&dir.path().join("fresh/nested")).is_ok());
    }
}
