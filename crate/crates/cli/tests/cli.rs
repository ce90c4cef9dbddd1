use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
[model]
L = 5
B0 = 1.25
deltaB = -1.25

[grid]
W = [2.0, 20.0]
omega = [6.0, 12.0]

[protocol]
m = 4
realizations = 3
master_seed = 99

[observables]
level_stats = true
kld_pt = true
entropy = true
support = true
anti_concentration = true
magnus_defect = true
digital_baseline = true

[estimator]
subsystems = 3
subsystem_size = 2

[series]
m_max = 6
points = [{ label = "thermal", W = 2.0, omega = 6.0 }, { label = "mbl", W = 20.0, omega = 6.0 }]

[digital]
layers_max = 8
seeds = 4
"#;

fn fpl(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fpl"));
    cmd.args(args).env_remove("FPL_THREADS");
    if let Some(t) = threads {
        cmd.env("FPL_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn sweep(config: &Path, out: &Path, threads: &str) -> Output {
    fpl(
        &[
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
        ],
        None,
    )
}

fn csv_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    names
}

#[test]
fn sweep_writes_every_artifact_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("small.toml");
    fs::write(&config, SMALL).unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));

    let out = sweep(&config, &a, "1");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = sweep(&config, &b, "3");
    assert!(out.status.success());

    let names = csv_files(&a);
    for want in [
        "grid.csv",
        "r_u0.csv",
        "refcurves.csv",
        "kld_vs_m.csv",
        "digital.csv",
        "analog_digital.csv",
        "hist_c0000_r.csv",
        "hist_c0003_np.csv",
        "hist_c0001_r_u0.csv",
    ] {
        assert!(names.iter().any(|n| n == want), "missing {want} in {names:?}");
    }
    assert_eq!(names, csv_files(&b));
    for n in &names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n} differs");
    }
    assert_eq!(fs::read(a.join("run.json")).unwrap(), fs::read(b.join("run.json")).unwrap());

    let grid = fs::read_to_string(a.join("grid.csv")).unwrap();
    let mut lines = grid.lines();
    assert_eq!(
        lines.next().unwrap(),
        "W_over_J,omega_over_J,mean_r,std_r,kld_pt,kld_pt_std,entropy_mean,entropy_std,support_mean,anticonc_mean,magnus_defect0,n_realizations"
    );
    let coords: Vec<(String, String)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 12);
            assert!(f.iter().all(|x| !x.is_empty()));
            (f[0].to_string(), f[1].to_string())
        })
        .collect();
    let want: Vec<(String, String)> = [("2", "6"), ("20", "6"), ("2", "12"), ("20", "12")]
        .iter()
        .map(|(w, o)| (w.to_string(), o.to_string()))
        .collect();
    assert_eq!(coords, want);

    let series = fs::read_to_string(a.join("kld_vs_m.csv")).unwrap();
    assert!(series.starts_with("m,kld_thermal,kld_mbl\n"));
    assert_eq!(series.lines().count(), 7);
    assert!(fs::read_to_string(a.join("refcurves.csv")).unwrap().starts_with("curve,x,density\n"));
    assert!(fs::read_to_string(a.join("hist_c0000_r.csv")).unwrap().starts_with("bin_lo,bin_hi,mass\n"));

    let run: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("run.json")).unwrap()).unwrap();
    assert_eq!(run["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(run["cells"].as_array().unwrap().len(), 4);
    assert_eq!(run["digital_seeds"].as_array().unwrap().len(), 4);
    assert!(!fs::read_to_string(a.join("run.json")).unwrap().contains("time"));
}

#[test]
fn empty_observables_give_header_only_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bare.toml");
    fs::write(
        &config,
        "[model]\nL = 3\nB0 = 1.0\ndeltaB = -1.0\n[grid]\nW = [1.0]\nomega = [5.0]\n[protocol]\nm = 1\nrealizations = 1\nmaster_seed = 1\n",
    )
    .unwrap();
    let out = sweep(&config, tmp.path(), "1");
    assert!(out.status.success());
    let grid = fs::read_to_string(tmp.path().join("grid.csv")).unwrap();
    assert_eq!(grid.lines().nth(1).unwrap(), "1,5,,,,,,,,,,1");
}

#[test]
fn resume_reuses_finished_cells() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("c.toml");
    fs::write(
        &config,
        "[model]\nL = 4\nB0 = 1.0\ndeltaB = -1.0\n[grid]\nW = [1.0, 2.0]\nomega = [5.0]\n[protocol]\nm = 2\nrealizations = 2\nmaster_seed = 1\n[observables]\nkld_pt = true\n",
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    assert!(sweep(&config, &out_dir, "1").status.success());
    let first = fs::read(out_dir.join("grid.csv")).unwrap();
    let cache: Vec<_> = fs::read_dir(out_dir.join(".cache")).unwrap().collect();
    assert_eq!(cache.len(), 1);
    let out = fpl(
        &[
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--resume",
        ],
        Some("2"),
    );
    assert!(out.status.success());
    assert_eq!(fs::read(out_dir.join("grid.csv")).unwrap(), first);
}

#[test]
fn failed_cells_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("c.toml");
    // the second cell needs far more slices than the ceiling allows
    fs::write(
        &config,
        "[model]\nL = 3\nB0 = 1.0\ndeltaB = -1.0\n[grid]\nW = [1.0, 1e7]\nomega = [0.01]\n[protocol]\nm = 1\nrealizations = 1\nmaster_seed = 1\n[observables]\nkld_pt = true\n",
    )
    .unwrap();
    let out = sweep(&config, tmp.path(), "1");
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
    let grid = fs::read_to_string(tmp.path().join("grid.csv")).unwrap();
    let rows: Vec<&str> = grid.lines().skip(1).collect();
    assert!(!rows[0].split(',').nth(4).unwrap().is_empty());
    assert_eq!(rows[1], "10000000,0.01,,,,,,,,,,0");
}

#[test]
fn bad_inputs_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.toml");
    fs::write(&config, "[model]\nL = 3\n").unwrap();
    assert_eq!(sweep(&config, tmp.path(), "1").status.code(), Some(1));
    assert_eq!(fpl(&["sweep"], None).status.code(), Some(1));
    assert_eq!(fpl(&["sweep", "--recipe", "fig9"], None).status.code(), Some(1));
    assert_eq!(fpl(&["sweep", "--threads", "many"], None).status.code(), Some(1));
    assert_eq!(fpl(&["--help"], None).status.code(), Some(0));

    let file = tmp.path().join("occupied");
    fs::write(&file, "").unwrap();
    let out = fpl(&["sweep", "--recipe", "fig2", "--out", file.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1), "preflight must fail before computing");
}

#[test]
fn recipe_prints_a_loadable_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = fpl(&["recipe", "fig6-digital"], None);
    assert!(out.status.success());
    let path = tmp.path().join("fig6.toml");
    fs::write(&path, &out.stdout).unwrap();
    let config = fpl_core::harness::ExperimentConfig::load(&path).unwrap();
    assert_eq!(config, fpl_core::harness::Recipe::Fig6Digital.config());
    assert!(config.observables.digital_baseline);
}

#[test]
fn analyze_reports_every_criterion() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("small.toml");
    fs::write(&config, SMALL).unwrap();
    assert!(sweep(&config, tmp.path(), "1").status.success());
    let out = fpl(&["analyze", "--in", tmp.path().to_str().unwrap(), "--check", "acceptance"], None);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 12, "{text}");
    assert!(text.lines().next().unwrap().starts_with("PASS [ 1]"));
    assert!(text.contains("PASS [ 9] propagator certification"));
    assert_eq!(out.status.code(), Some(0), "{text}");

    let missing = fpl(&["analyze", "--in", tmp.path().join("nowhere").to_str().unwrap()], None);
    assert_eq!(missing.status.code(), Some(1));
}
