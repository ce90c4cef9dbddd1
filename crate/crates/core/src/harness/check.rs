//! Acceptance checks against emitted sweep directories.
//!
//! Criteria that need more than the files of finished runs (the Magnus
//! oracles, the Kronecker oracles and the thread-count determinism check)
//! are reported as skipped here and covered by the `acceptance` test target.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use super::emit::{hist_file_name, RunRecord, GRID_COLUMNS, HIST_COLUMNS};
use crate::error::{Error, Result};
use crate::spectra::{reference_bin_masses, reference_mean, Ensemble};
use crate::stats::kl_divergence;

/// Cycle count at which the sampling criteria are stated.
pub const CHECK_CYCLES: usize = 10;
const COORD_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skip => "SKIP",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub criterion: u8,
    pub name: &'static str,
    pub verdict: Verdict,
    pub detail: String,
}

impl CheckOutcome {
    pub fn new(criterion: u8, name: &'static str, pass: bool, detail: String) -> Self {
        Self {
            criterion,
            name,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            detail,
        }
    }

    fn skip(criterion: u8, name: &'static str, why: impl Into<String>) -> Self {
        Self {
            criterion,
            name,
            verdict: Verdict::Skip,
            detail: why.into(),
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{:>2}] {}: {}", self.verdict, self.criterion, self.name, self.detail)
    }
}

/// One row of `grid.csv` with its run context.
#[derive(Clone, Debug)]
pub struct CellEvidence {
    pub w: f64,
    pub omega: f64,
    pub m: usize,
    pub values: BTreeMap<String, f64>,
    pub mean_r_u0: Option<f64>,
    /// `(lo, hi, mass)` of the pooled r histogram.
    pub r_hist: Option<Vec<(f64, f64, f64)>>,
}

impl CellEvidence {
    pub fn value(&self, column: &str) -> Option<f64> {
        self.values.get(column).copied()
    }

    fn at(&self, w: f64, omega: f64) -> bool {
        (self.w - w).abs() < COORD_TOL && (self.omega - omega).abs() < COORD_TOL
    }
}

/// Parsed artifacts of one or more sweep directories.
#[derive(Clone, Debug, Default)]
pub struct Evidence {
    pub cells: Vec<CellEvidence>,
    pub runs: Vec<RunRecord>,
    /// `kld_vs_m.csv` columns by label, indexed by `m − 1`.
    pub series: BTreeMap<String, Vec<Option<f64>>>,
    /// Digital KLD by depth.
    pub digital: Option<Vec<f64>>,
}

type Table = (Vec<String>, Vec<Vec<Option<f64>>>);

/// Header and numeric rows of a CSV file; empty fields become `None`.
fn read_table(path: &Path) -> Result<Table> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                if f.is_empty() {
                    Ok(None)
                } else {
                    f.parse::<f64>().map(Some).map_err(|_| {
                        Error::Config(format!("{}: field {f:?} is not a number", path.display()))
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

fn column(header: &[String], name: &str, path: &Path) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Config(format!("{}: missing column {name}", path.display())))
}

impl Evidence {
    /// Reads `run.json`, `grid.csv` and whichever optional files exist.
    pub fn load(dir: &Path) -> Result<Self> {
        let run = RunRecord::load(dir)?;
        let m = run.config.protocol.m;
        let grid_path = dir.join("grid.csv");
        let (header, rows) = read_table(&grid_path)?;
        if header != GRID_COLUMNS {
            return Err(Error::Config(format!(
                "{}: header {header:?} differs from the fixed column order",
                grid_path.display()
            )));
        }
        if rows.len() != run.cells.len() {
            return Err(Error::Config(format!(
                "{} has {} rows but run.json lists {} cells",
                grid_path.display(),
                rows.len(),
                run.cells.len()
            )));
        }
        let u0_path = dir.join("r_u0.csv");
        let u0 = if u0_path.exists() {
            let (h, rows) = read_table(&u0_path)?;
            let col = column(&h, "mean_r_u0", &u0_path)?;
            Some(rows.into_iter().map(|r| r[col]).collect::<Vec<_>>())
        } else {
            None
        };

        let mut cells = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let (Some(w), Some(omega)) = (row[0], row[1]) else {
                return Err(Error::Config(format!("{}: row {i} lacks coordinates", grid_path.display())));
            };
            let values = GRID_COLUMNS
                .iter()
                .zip(row)
                .skip(2)
                .filter_map(|(c, v)| v.map(|v| (c.to_string(), v)))
                .collect();
            let hist_path = dir.join(hist_file_name(run.cells[i].index, "r"));
            let r_hist = if hist_path.exists() {
                let (h, rows) = read_table(&hist_path)?;
                if h != HIST_COLUMNS {
                    return Err(Error::Config(format!("{}: unexpected header {h:?}", hist_path.display())));
                }
                Some(
                    rows.into_iter()
                        .map(|r| (r[0].unwrap_or(0.0), r[1].unwrap_or(0.0), r[2].unwrap_or(0.0)))
                        .collect(),
                )
            } else {
                None
            };
            cells.push(CellEvidence {
                w,
                omega,
                m,
                values,
                mean_r_u0: u0.as_ref().and_then(|v| v[i]),
                r_hist,
            });
        }

        let mut series = BTreeMap::new();
        let series_path = dir.join("kld_vs_m.csv");
        if series_path.exists() {
            let (h, rows) = read_table(&series_path)?;
            for (k, name) in h.iter().enumerate() {
                if let Some(label) = name.strip_prefix("kld_") {
                    series.insert(label.to_string(), rows.iter().map(|r| r[k]).collect());
                }
            }
        }
        let digital_path = dir.join("digital.csv");
        let digital = if digital_path.exists() {
            let (h, rows) = read_table(&digital_path)?;
            let col = column(&h, "kld_pt", &digital_path)?;
            Some(rows.into_iter().map(|r| r[col].unwrap_or(f64::NAN)).collect())
        } else {
            None
        };
        Ok(Self {
            cells,
            runs: vec![run],
            series,
            digital,
        })
    }

    pub fn load_all<P: AsRef<Path>>(dirs: &[P]) -> Result<Self> {
        let mut out = Evidence::default();
        for d in dirs {
            out.merge(Evidence::load(d.as_ref())?);
        }
        Ok(out)
    }

    /// Appends another directory's evidence; later series and digital data
    /// take precedence.
    pub fn merge(&mut self, other: Evidence) {
        self.cells.extend(other.cells);
        self.runs.extend(other.runs);
        self.series.extend(other.series);
        if other.digital.is_some() {
            self.digital = other.digital;
        }
    }

    fn cell(&self, w: f64, omega: f64, needs_m: bool, column: &str) -> Option<&CellEvidence> {
        self.cells
            .iter()
            .find(|c| c.at(w, omega) && (!needs_m || c.m == CHECK_CYCLES) && c.value(column).is_some())
    }

    /// Value of `column` after ten cycles, from `grid.csv` or, for KLDs, from
    /// the labelled series.
    fn sampled(&self, w: f64, omega: f64, column: &str, label: &str) -> Option<f64> {
        self.cell(w, omega, true, column)
            .and_then(|c| c.value(column))
            .or_else(|| {
                (column == "kld_pt")
                    .then(|| self.series.get(label)?.get(CHECK_CYCLES - 1).copied().flatten())
                    .flatten()
            })
    }
}

const PAPER_MEANS: [(Ensemble, f64); 3] = [(Ensemble::Coe, 0.527), (Ensemble::Poisson, 0.386), (Ensemble::Goe, 0.536)];

pub fn check_reference_means() -> CheckOutcome {
    const NAME: &str = "reference ensemble means";
    let mut pass = true;
    let mut parts = Vec::new();
    for (ens, paper) in PAPER_MEANS {
        match reference_mean(ens) {
            Ok(v) => {
                pass &= (v - paper).abs() <= 1e-3;
                parts.push(format!("{} {v:.6} (paper {paper})", ens.label()));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{}: {e}", ens.label()));
            }
        }
    }
    CheckOutcome::new(1, NAME, pass, parts.join(", "))
}

fn level_point(
    ev: &Evidence,
    criterion: u8,
    name: &'static str,
    (w, omega): (f64, f64),
    target: f64,
    ensemble: Ensemble,
) -> CheckOutcome {
    let Some(cell) = ev.cell(w, omega, false, "mean_r") else {
        return CheckOutcome::skip(criterion, name, format!("no level statistics at W = {w}, omega = {omega}"));
    };
    let Some(hist) = &cell.r_hist else {
        return CheckOutcome::skip(criterion, name, "no r histogram file");
    };
    let r = cell.value("mean_r").expect("selected on mean_r");
    let ranges: Vec<(f64, f64)> = hist.iter().map(|&(lo, hi, _)| (lo, hi)).collect();
    let masses: Vec<f64> = hist.iter().map(|&(_, _, m)| m).collect();
    let kld = reference_bin_masses(ensemble, &ranges).and_then(|p| kl_divergence(&masses, &p));
    match kld {
        Ok(kld) => CheckOutcome::new(
            criterion,
            name,
            (r - target).abs() <= 0.02 && kld < 0.02,
            format!("<r> = {r:.4} (target {target} ± 0.02), KLD to {} = {kld:.4} (< 0.02)", ensemble.label()),
        ),
        Err(e) => CheckOutcome::new(criterion, name, false, e.to_string()),
    }
}

fn prethermal(ev: &Evidence) -> CheckOutcome {
    const NAME: &str = "prethermal level statistics";
    let Some(cell) = ev.cell(4.0, 20.1, false, "mean_r") else {
        return CheckOutcome::skip(4, NAME, "no level statistics at W = 4, omega = 20.1");
    };
    let Some(r0) = cell.mean_r_u0 else {
        return CheckOutcome::skip(4, NAME, "no r_u0.csv");
    };
    let r = cell.value("mean_r").expect("selected on mean_r");
    CheckOutcome::new(
        4,
        NAME,
        (r - 0.536).abs() <= 0.03 && (r - r0).abs() < 0.02,
        format!("<r>_U = {r:.4} (0.536 ± 0.03), <r>_U0 = {r0:.4}, difference {:.4} (< 0.02)", (r - r0).abs()),
    )
}

fn kld_ordering(ev: &Evidence) -> CheckOutcome {
    const NAME: &str = "KLD-to-PT ordering";
    let t = ev.sampled(3.0, 8.0, "kld_pt", "thermal");
    let p = ev.sampled(4.0, 20.0, "kld_pt", "prethermal");
    let m = ev.sampled(30.0, 8.0, "kld_pt", "mbl");
    let (Some(t), Some(p), Some(m)) = (t, p, m) else {
        return CheckOutcome::skip(5, NAME, "needs KLDs at m = 10 for (3, 8), (4, 20) and (30, 8)");
    };
    CheckOutcome::new(
        5,
        NAME,
        t < p && p < m && t < 0.1,
        format!("thermal {t:.4} < prethermal {p:.4} < mbl {m:.4}, thermal < 0.1"),
    )
}

fn anti_concentration(ev: &Evidence) -> CheckOutcome {
    const NAME: &str = "anti-concentration";
    let t = ev.sampled(3.0, 8.0, "anticonc_mean", "");
    let m = ev.sampled(30.0, 8.0, "anticonc_mean", "");
    let (Some(t), Some(m)) = (t, m) else {
        return CheckOutcome::skip(6, NAME, "needs anti-concentration at m = 10 for (3, 8) and (30, 8)");
    };
    CheckOutcome::new(
        6,
        NAME,
        (t - 0.368).abs() <= 0.05 && m < 0.1,
        format!("thermal {t:.4} (0.368 ± 0.05), mbl {m:.4} (< 0.1)"),
    )
}

fn entropy(ev: &Evidence) -> CheckOutcome {
    const NAME: &str = "entanglement entropy";
    let t = ev.sampled(3.0, 8.0, "entropy_mean", "");
    let ts = ev.sampled(3.0, 8.0, "entropy_std", "");
    let m = ev.sampled(30.0, 8.0, "entropy_mean", "");
    let (Some(t), Some(ts), Some(m)) = (t, ts, m) else {
        return CheckOutcome::skip(7, NAME, "needs entropies at m = 10 for (3, 8) and (30, 8)");
    };
    let s_max = 3.0;
    CheckOutcome::new(
        7,
        NAME,
        (t - s_max).abs() <= 0.25 && ts < 0.15 && m < 1.5,
        format!("thermal {t:.4} bits (3 ± 0.25), spread {ts:.4} (< 0.15), mbl {m:.4} (< 1.5)"),
    )
}

fn certification(ev: &Evidence) -> CheckOutcome {
    const NAME: &str = "propagator certification";
    let mut worst_conv = 0.0f64;
    let mut worst_unit = 0.0f64;
    let mut count = 0usize;
    let mut failed = Vec::new();
    for run in &ev.runs {
        for cell in &run.cells {
            if cell.failure.is_some() || cell.n_realizations == 0 {
                failed.push(cell.index);
            }
            for r in &cell.realizations {
                if let (Some(c), Some(u)) = (r.convergence_defect, r.unitarity_defect) {
                    worst_conv = worst_conv.max(c);
                    worst_unit = worst_unit.max(u);
                    count += 1;
                }
            }
        }
    }
    if count == 0 {
        return CheckOutcome::skip(9, NAME, "no propagator provenance recorded");
    }
    CheckOutcome::new(
        9,
        NAME,
        failed.is_empty() && worst_conv < 1e-8 && worst_unit < 1e-9,
        format!(
            "{count} unitaries, worst self-convergence {worst_conv:.2e} (< 1e-8), worst unitarity {worst_unit:.2e} (< 1e-9), failed cells {failed:?}"
        ),
    )
}

/// Centered `k`-point moving average, `len − k + 1` values.
pub fn moving_average(xs: &[f64], k: usize) -> Vec<f64> {
    xs.windows(k).map(|w| w.iter().sum::<f64>() / k as f64).collect()
}

fn digital(ev: &Evidence) -> CheckOutcome {
    const NAME: &str = "digital baseline";
    let Some(d) = &ev.digital else {
        return CheckOutcome::skip(11, NAME, "no digital.csv");
    };
    let Some(analog) = ev.sampled(3.0, 8.0, "kld_pt", "thermal") else {
        return CheckOutcome::skip(11, NAME, "needs the analog KLD at m = 10, W = 3, omega = 8");
    };
    if d.len() <= 40 {
        return CheckOutcome::skip(11, NAME, "digital.csv stops before 40 layers");
    }
    let ma = moving_average(&d[1..=40], 5);
    let rises = ma.windows(2).filter(|w| w[1] > w[0]).count();
    let pass = rises == 0 && d[10] > analog && d[40] < 0.05;
    CheckOutcome::new(
        11,
        NAME,
        pass,
        format!(
            "moving-average rises {rises} (0), digital at 10 layers {:.4} > analog {analog:.4}, digital at 40 layers {:.4} (< 0.05)",
            d[10], d[40]
        ),
    )
}

/// Every criterion in order, with those that need more than files skipped.
pub fn check_acceptance(ev: &Evidence) -> Vec<CheckOutcome> {
    let mut out = vec![
        check_reference_means(),
        level_point(ev, 2, "driven-thermal level statistics", (4.0, 4.2), 0.527, Ensemble::Coe),
        level_point(ev, 3, "driven-MBL level statistics", (30.0, 8.0), 0.386, Ensemble::Poisson),
        prethermal(ev),
        kld_ordering(ev),
        anti_concentration(ev),
        entropy(ev),
        CheckOutcome::skip(8, "Magnus terms", "oracle check, run by the acceptance test target"),
        certification(ev),
        CheckOutcome::skip(10, "Kronecker oracles", "oracle check, run by the acceptance test target"),
        digital(ev),
        CheckOutcome::skip(12, "determinism", "needs two runs, done by the acceptance test target"),
    ];
    out.sort_by_key(|c| c.criterion);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_means_pass() {
        assert_eq!(check_reference_means().verdict, Verdict::Pass);
    }

    #[test]
    fn moving_average_of_a_ramp() {
        assert_eq!(moving_average(&[5.0, 4.0, 3.0, 2.0, 1.0, 0.0], 5), vec![3.0, 2.0]);
    }

    #[test]
    fn empty_evidence_skips_file_criteria() {
        let out = check_acceptance(&Evidence::default());
        assert_eq!(out.len(), 12);
        assert!(out.iter().enumerate().all(|(i, c)| c.criterion as usize == i + 1));
        assert!(out[1..].iter().all(|c| c.verdict == Verdict::Skip));
    }
}
