//! Grid sweeps over `(W, ω)` with disorder averaging.
//!
//! Every `(cell, realization)` pair is an independent task. Results are
//! collected in task order and folded sequentially, so the output does not
//! depend on the thread count or on scheduling.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::circuits::{circuit_trajectory, CircuitSpec};
use crate::entanglement::{entropy_over, random_subsystems, SubsystemChoice};
use crate::error::{Error, Result};
use crate::magnus::{magnus_defect, MagnusOrder};
use crate::model::{cell_seed, draw_disorder};
use crate::ops::StateVector;
use crate::propagator::{floquet_unitary, initial_state};
use crate::sampling::{anti_concentration_fraction, kld_to_pt, output_distribution, support_size, ProbabilityHistogram};
use crate::spectra::{r_statistics_with_bins, EigenphaseSet, PhaseSource};
use crate::stats::{mean, std_dev, UniformHistogram};

/// Stream of the cell seed that fixes the entropy subsystems of a cell.
const SUBSYSTEM_STREAM: u64 = u64::MAX;
/// Streams of the master seed from this offset on seed the digital circuits.
const DIGITAL_STREAM_BASE: u64 = 1 << 62;

/// Seed of random circuit `k` in the digital baseline.
pub fn digital_seed(master_seed: u64, k: usize) -> u64 {
    cell_seed(master_seed, DIGITAL_STREAM_BASE + k as u64)
}

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    /// Worker threads; the rayon default when absent.
    pub threads: Option<usize>,
    /// Reuse cached cells instead of recomputing them.
    pub resume: bool,
    /// Directory holding the per-configuration cell caches. No caching when
    /// absent.
    pub cache_root: Option<PathBuf>,
}

/// Per-realization bookkeeping kept in the provenance record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationProvenance {
    /// Stream index of the disorder draw under the cell seed.
    pub index: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slices: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unitarity_defect: Option<f64>,
}

/// Reduced observables of one grid cell. Fields of disabled observables stay
/// `None`; a failed cell carries only `failure`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub index: usize,
    #[serde(rename = "W")]
    pub w: f64,
    pub omega: f64,
    pub seed: u64,
    pub n_realizations: usize,
    pub failure: Option<String>,
    pub mean_r: Option<f64>,
    pub std_r: Option<f64>,
    pub mean_r_u0: Option<f64>,
    pub std_r_u0: Option<f64>,
    pub r_hist: Option<UniformHistogram>,
    pub r_u0_hist: Option<UniformHistogram>,
    /// Pooled `N·p` histogram after `m` cycles.
    pub np_hist: Option<ProbabilityHistogram>,
    /// KLD of the pooled histogram.
    pub kld_pt: Option<f64>,
    /// Spread of the per-realization KLDs.
    pub kld_pt_std: Option<f64>,
    pub entropy_mean: Option<f64>,
    /// Mean over realizations of the spread across subsystems.
    pub entropy_std: Option<f64>,
    pub subsystems: Option<Vec<SubsystemChoice>>,
    pub support_mean: Option<f64>,
    pub anticonc_mean: Option<f64>,
    pub magnus_defect0: Option<f64>,
    /// Pooled KLD after `1..=m_max` cycles, for series points.
    pub kld_series: Option<Vec<f64>>,
    pub realizations: Vec<RealizationProvenance>,
}

impl CellResult {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }
}

/// Random-circuit baseline pooled over seeds, one entry per depth
/// `0..=layers_max`; depth 0 is the state after the Hadamard layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DigitalResult {
    pub seeds: Vec<u64>,
    pub kld_pt: Vec<f64>,
    pub kld_pt_std: Vec<f64>,
    pub anticonc_mean: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub code_version: String,
    pub cells: Vec<CellResult>,
    pub digital: Option<DigitalResult>,
}

impl SweepResult {
    pub fn failed_cells(&self) -> Vec<usize> {
        self.cells.iter().filter(|c| c.failed()).map(|c| c.index).collect()
    }

    pub fn cell_at(&self, w: f64, omega: f64) -> Option<&CellResult> {
        self.config.cell_of(w, omega).map(|i| &self.cells[i])
    }
}

/// Everything a realization task needs to know about its cell.
struct CellPlan {
    index: usize,
    w: f64,
    omega: f64,
    seed: u64,
    subsystems: Option<Vec<SubsystemChoice>>,
    series_len: usize,
}

#[derive(Default)]
struct RealizationRecord {
    provenance: Option<RealizationProvenance>,
    mean_r: Option<f64>,
    mean_r_u0: Option<f64>,
    r_hist: Option<UniformHistogram>,
    r_u0_hist: Option<UniformHistogram>,
    np_hist: Option<ProbabilityHistogram>,
    kld_pt: Option<f64>,
    entropy: Option<(f64, f64)>,
    support: Option<usize>,
    anticonc: Option<f64>,
    magnus_defect0: Option<f64>,
    series: Vec<ProbabilityHistogram>,
}

fn np_histogram(config: &ExperimentConfig) -> Result<ProbabilityHistogram> {
    let e = &config.estimator;
    ProbabilityHistogram::new(e.np_lo, e.np_hi, e.np_bins)
}

fn histogram_of(config: &ExperimentConfig, state: &StateVector) -> Result<ProbabilityHistogram> {
    let mut hist = np_histogram(config)?;
    hist.add(&output_distribution(state, 0));
    Ok(hist)
}

fn plan_cells(config: &ExperimentConfig) -> Result<Vec<CellPlan>> {
    let series_len = config.series.as_ref().map_or(0, |s| s.m_max);
    (0..config.n_cells())
        .map(|index| {
            let (w, omega) = config.cell_coordinates(index);
            let seed = cell_seed(config.protocol.master_seed, index as u64);
            let subsystems = if config.observables.entropy {
                let e = &config.estimator;
                Some(random_subsystems(
                    config.model.n_sites,
                    e.subsystems,
                    e.subsystem_size,
                    cell_seed(seed, SUBSYSTEM_STREAM),
                    e.contiguous_subsystems,
                )?)
            } else {
                None
            };
            let on_series = config
                .series
                .iter()
                .flat_map(|s| &s.points)
                .any(|p| p.w == w && p.omega == omega);
            Ok(CellPlan {
                index,
                w,
                omega,
                seed,
                subsystems,
                series_len: if on_series { series_len } else { 0 },
            })
        })
        .collect()
}

fn run_realization(config: &ExperimentConfig, plan: &CellPlan, k: u64) -> Result<RealizationRecord> {
    let obs = &config.observables;
    let mut rec = RealizationRecord::default();
    if !obs.needs_unitary() && plan.series_len == 0 {
        rec.provenance = Some(RealizationProvenance {
            index: k,
            slices: None,
            convergence_defect: None,
            unitarity_defect: None,
        });
        return Ok(rec);
    }
    let spec = config.chain(plan.w, plan.omega, plan.seed)?;
    let disorder = draw_disorder(&spec, k);
    let ops = floquet_unitary(&spec, &disorder)?;
    let unitarity = ops.u.unitarity_defect();
    if unitarity > 1e-9 {
        return Err(Error::Validation {
            what: "unitarity",
            defect: unitarity,
        });
    }
    rec.provenance = Some(RealizationProvenance {
        index: k,
        slices: Some(ops.slices_used),
        convergence_defect: Some(ops.convergence_defect),
        unitarity_defect: Some(unitarity),
    });

    if obs.level_stats {
        let bins = config.estimator.r_bins;
        let r = r_statistics_with_bins(&EigenphaseSet::from_unitary(&ops.u, PhaseSource::Floquet)?, bins)?;
        let r0 = r_statistics_with_bins(&EigenphaseSet::from_unitary(&ops.u0, PhaseSource::Static)?, bins)?;
        rec.mean_r = Some(r.mean_r);
        rec.mean_r_u0 = Some(r0.mean_r);
        rec.r_hist = Some(r.histogram);
        rec.r_u0_hist = Some(r0.histogram);
    }
    if obs.magnus_defect {
        rec.magnus_defect0 = Some(magnus_defect(&spec, &disorder, MagnusOrder::Zeroth, &ops.u)?);
    }

    if obs.needs_state() || plan.series_len > 0 {
        let cycles = config.protocol.m.max(plan.series_len);
        let mut state = initial_state(spec.n_sites)?;
        let mut at_m = (config.protocol.m == 0).then(|| state.clone());
        for c in 1..=cycles {
            state = ops.u.apply(&state)?;
            if c <= plan.series_len {
                rec.series.push(histogram_of(config, &state)?);
            }
            if c == config.protocol.m {
                at_m = Some(state.clone());
            }
        }
        let state = at_m.expect("the cycle loop reaches m");
        let dist = output_distribution(&state, config.protocol.m);
        if obs.kld_pt {
            let hist = histogram_of(config, &state)?;
            rec.kld_pt = Some(kld_to_pt(&hist)?);
            rec.np_hist = Some(hist);
        }
        if let Some(subs) = &plan.subsystems {
            let panel = entropy_over(&state, subs)?;
            rec.entropy = Some((panel.mean, panel.std));
        }
        if obs.support {
            rec.support = Some(support_size(&dist, config.estimator.support_threshold));
        }
        if obs.anti_concentration {
            rec.anticonc = Some(anti_concentration_fraction(&dist, config.estimator.anticonc_delta));
        }
    }
    Ok(rec)
}

fn merge_uniform(acc: &mut Option<UniformHistogram>, h: Option<UniformHistogram>) -> Result<()> {
    match (acc.as_mut(), h) {
        (Some(a), Some(h)) => a.merge(&h),
        (None, h) => {
            *acc = h;
            Ok(())
        }
        (Some(_), None) => Ok(()),
    }
}

fn merge_probability(acc: &mut Option<ProbabilityHistogram>, h: Option<ProbabilityHistogram>) -> Result<()> {
    match (acc.as_mut(), h) {
        (Some(a), Some(h)) => a.merge(&h),
        (None, h) => {
            *acc = h;
            Ok(())
        }
        (Some(_), None) => Ok(()),
    }
}

fn collect<T>(records: &[RealizationRecord], f: impl Fn(&RealizationRecord) -> Option<T>) -> Option<Vec<T>> {
    records.iter().map(f).collect()
}

/// Ordered fold of the realizations of one cell.
fn reduce_cell(plan: &CellPlan, outcomes: Vec<Result<RealizationRecord>>) -> CellResult {
    let empty = CellResult {
        index: plan.index,
        w: plan.w,
        omega: plan.omega,
        seed: plan.seed,
        ..CellResult::default()
    };
    let mut cell = empty.clone();
    let folded = outcomes
        .into_iter()
        .collect::<Result<Vec<_>>>()
        .and_then(|records| fold_records(&mut cell, plan, records));
    match folded {
        Ok(()) => cell,
        Err(e) => CellResult {
            failure: Some(e.to_string()),
            ..empty
        },
    }
}

fn fold_records(cell: &mut CellResult, plan: &CellPlan, records: Vec<RealizationRecord>) -> Result<()> {
    cell.n_realizations = records.len();
    let mean_std = |xs: Option<Vec<f64>>| xs.map(|v| (mean(&v), std_dev(&v)));
    if let Some((m, s)) = mean_std(collect(&records, |r| r.mean_r)) {
        cell.mean_r = Some(m);
        cell.std_r = Some(s);
    }
    if let Some((m, s)) = mean_std(collect(&records, |r| r.mean_r_u0)) {
        cell.mean_r_u0 = Some(m);
        cell.std_r_u0 = Some(s);
    }
    if let Some(klds) = collect(&records, |r| r.kld_pt) {
        cell.kld_pt_std = Some(std_dev(&klds));
    }
    if let Some(panels) = collect(&records, |r| r.entropy) {
        cell.entropy_mean = Some(mean(&panels.iter().map(|p| p.0).collect::<Vec<_>>()));
        cell.entropy_std = Some(mean(&panels.iter().map(|p| p.1).collect::<Vec<_>>()));
        cell.subsystems = plan.subsystems.clone();
    }
    cell.support_mean = collect(&records, |r| r.support.map(|s| s as f64)).map(|v| mean(&v));
    cell.anticonc_mean = collect(&records, |r| r.anticonc).map(|v| mean(&v));
    cell.magnus_defect0 = collect(&records, |r| r.magnus_defect0).map(|v| mean(&v));

    let mut series: Vec<Option<ProbabilityHistogram>> = vec![None; plan.series_len];
    for rec in records {
        cell.realizations.extend(rec.provenance);
        merge_uniform(&mut cell.r_hist, rec.r_hist)?;
        merge_uniform(&mut cell.r_u0_hist, rec.r_u0_hist)?;
        merge_probability(&mut cell.np_hist, rec.np_hist)?;
        for (acc, h) in series.iter_mut().zip(rec.series) {
            merge_probability(acc, Some(h))?;
        }
    }
    if let Some(h) = &cell.np_hist {
        cell.kld_pt = Some(kld_to_pt(h)?);
    }
    if plan.series_len > 0 {
        cell.kld_series = Some(
            series
                .iter()
                .map(|h| kld_to_pt(h.as_ref().expect("every realization fills the series")))
                .collect::<Result<_>>()?,
        );
    }
    Ok(())
}

fn cache_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("cell_{index}.json"))
}

fn load_cached(dir: &Path, plan: &CellPlan) -> Option<CellResult> {
    let text = fs::read_to_string(cache_path(dir, plan.index)).ok()?;
    let cell: CellResult = serde_json::from_str(&text).ok()?;
    (cell.index == plan.index && cell.w == plan.w && cell.omega == plan.omega && !cell.failed()).then_some(cell)
}

fn store_cached(dir: &Path, cell: &CellResult) -> Result<()> {
    let path = cache_path(dir, cell.index);
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_vec(cell)?)?;
    fs::rename(tmp, path)?;
    Ok(())
}

fn run_digital(config: &ExperimentConfig) -> Result<Option<DigitalResult>> {
    let Some(block) = config.digital.as_ref().filter(|_| config.observables.digital_baseline) else {
        return Ok(None);
    };
    let seeds: Vec<u64> = (0..block.seeds)
        .map(|k| digital_seed(config.protocol.master_seed, k))
        .collect();
    let per_seed: Vec<Result<Vec<(ProbabilityHistogram, f64, f64)>>> = seeds
        .par_iter()
        .map(|&seed| {
            let mut spec = CircuitSpec::new(config.model.n_sites, block.layers_max, seed)?;
            spec.cz_schedule = config.estimator.cz_schedule;
            circuit_trajectory(&spec, &initial_state(spec.n_sites)?)?
                .iter()
                .map(|state| {
                    let hist = histogram_of(config, state)?;
                    let kld = kld_to_pt(&hist)?;
                    let anti = anti_concentration_fraction(&output_distribution(state, 0), config.estimator.anticonc_delta);
                    Ok((hist, kld, anti))
                })
                .collect()
        })
        .collect();
    let per_seed = per_seed.into_iter().collect::<Result<Vec<_>>>()?;
    let depths = block.layers_max + 1;
    let mut out = DigitalResult {
        seeds,
        kld_pt: Vec::with_capacity(depths),
        kld_pt_std: Vec::with_capacity(depths),
        anticonc_mean: Vec::with_capacity(depths),
    };
    for d in 0..depths {
        let mut pooled = np_histogram(config)?;
        for s in &per_seed {
            pooled.merge(&s[d].0)?;
        }
        let klds: Vec<f64> = per_seed.iter().map(|s| s[d].1).collect();
        let anti: Vec<f64> = per_seed.iter().map(|s| s[d].2).collect();
        out.kld_pt.push(kld_to_pt(&pooled)?);
        out.kld_pt_std.push(std_dev(&klds));
        out.anticonc_mean.push(mean(&anti));
    }
    Ok(Some(out))
}

/// Runs every cell of the grid and the digital baseline if enabled.
///
/// A cell whose propagation or analysis fails is recorded with its error and
/// the sweep continues; configuration and I/O problems abort.
pub fn run_sweep(config: &ExperimentConfig, options: &SweepOptions) -> Result<SweepResult> {
    config.validate()?;
    // dense kernels run single-threaded inside each task
    faer::set_global_parallelism(faer::Par::Seq);
    let hash = config.hash()?;
    let cache_dir = match &options.cache_root {
        Some(root) => {
            let dir = root.join(&hash);
            fs::create_dir_all(&dir)?;
            Some(dir)
        }
        None => None,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = options.threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let plans = plan_cells(config)?;
    let mut cells: Vec<Option<CellResult>> = plans
        .iter()
        .map(|p| match (&cache_dir, options.resume) {
            (Some(dir), true) => load_cached(dir, p),
            _ => None,
        })
        .collect();
    let d = config.protocol.realizations as u64;
    let tasks: Vec<(usize, u64)> = plans
        .iter()
        .filter(|p| cells[p.index].is_none())
        .flat_map(|p| (0..d).map(move |k| (p.index, k)))
        .collect();

    let (outcomes, digital) = pool.install(|| {
        let outcomes: Vec<Result<RealizationRecord>> = tasks
            .par_iter()
            .map(|&(c, k)| run_realization(config, &plans[c], k))
            .collect();
        (outcomes, run_digital(config))
    });
    let mut outcomes = outcomes.into_iter();
    for plan in &plans {
        if cells[plan.index].is_some() {
            continue;
        }
        let chunk: Vec<_> = outcomes.by_ref().take(d as usize).collect();
        let cell = reduce_cell(plan, chunk);
        if let (Some(dir), false) = (&cache_dir, cell.failed()) {
            store_cached(dir, &cell)?;
        }
        cells[plan.index] = Some(cell);
    }
    Ok(SweepResult {
        config: config.clone(),
        config_hash: hash,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        cells: cells.into_iter().map(|c| c.expect("every cell is filled")).collect(),
        digital: digital?,
    })
}
