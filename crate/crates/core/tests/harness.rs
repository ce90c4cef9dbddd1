use fpl_core::harness::emit::RunRecord;
use fpl_core::harness::{emit, run_sweep, Evidence, ExperimentConfig, SweepOptions};

const CONFIG: &str = r#"
[model]
L = 5
B0 = 1.25
deltaB = -1.25

[grid]
W = [3.0, 30.0]
omega = [8.0]

[protocol]
m = 5
realizations = 4
master_seed = 3

[observables]
level_stats = true
kld_pt = true
entropy = true
anti_concentration = true

[estimator]
subsystems = 3
subsystem_size = 2
"#;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-8 * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn emitted_files_reload_into_matching_evidence() {
    let config = ExperimentConfig::from_toml(CONFIG).unwrap();
    let result = run_sweep(&config, &SweepOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit(&result, dir.path()).unwrap();

    let ev = Evidence::load(dir.path()).unwrap();
    assert_eq!(ev.cells.len(), 2);
    for (cell, loaded) in result.cells.iter().zip(&ev.cells) {
        assert_eq!((cell.w, cell.omega, 5), (loaded.w, loaded.omega, loaded.m));
        for (column, value) in [
            ("mean_r", cell.mean_r),
            ("kld_pt", cell.kld_pt),
            ("entropy_mean", cell.entropy_mean),
            ("anticonc_mean", cell.anticonc_mean),
        ] {
            let (a, b) = (value.unwrap(), loaded.value(column).unwrap());
            assert!(close(a, b), "{column}: {a} vs {b}");
        }
        let masses: f64 = loaded.r_hist.as_ref().unwrap().iter().map(|&(_, _, m)| m).sum();
        assert!((masses - 1.0).abs() < 1e-8);
    }

    let record = RunRecord::load(dir.path()).unwrap();
    assert_eq!(record, RunRecord::from_result(&result));
    assert_eq!(record.config_hash, config.hash().unwrap());
    assert!(record.failed_cells.is_empty());
    assert!(record.cells.iter().all(|c| c.realizations.len() == 4));
}
