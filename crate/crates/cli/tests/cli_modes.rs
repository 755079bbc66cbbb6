//! End-to-end checks of the experiment modes through the library surface.

use movingwall_cli::config::ExperimentConfig;
use movingwall_cli::runner;
use std::fs;

fn small_solve_config() -> ExperimentConfig {
    ExperimentConfig::parse(
        "beta = 0.5\ngrid_n = 256\ntau_end = 1.0\nsnapshot_count = 8\n",
    )
    .unwrap()
}

#[test]
fn solve_mode_emits_four_files() {
    let dir = tempfile::tempdir().unwrap();
    let files = runner::run_solve(&small_solve_config(), dir.path()).unwrap();
    assert_eq!(files.len(), 4);
    for f in &files {
        assert!(f.exists(), "{f:?} missing");
        assert!(fs::metadata(f).unwrap().len() > 0);
    }
    let names: Vec<_> = files
        .iter()
        .map(|f| f.file_name().unwrap().to_string_lossy().to_string())
        .collect();
    assert_eq!(
        names,
        ["snapshots.csv", "diagnostics.csv", "density.svg", "distance.svg"]
    );
}

#[test]
fn solve_mode_is_byte_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    runner::run_solve(&small_solve_config(), a.path()).unwrap();
    runner::run_solve(&small_solve_config(), b.path()).unwrap();
    for name in ["snapshots.csv", "diagnostics.csv", "density.svg", "distance.svg"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
}

#[test]
fn kernel_mode_requires_linear_wall() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::parse("beta = 0.5\n").unwrap();
    assert!(runner::run_kernel(&cfg, dir.path()).is_err());

    let cfg =
        ExperimentConfig::parse("beta = 1\ngrid_n = 64\nt_end = 2\nsnapshot_count = 2\n").unwrap();
    let files = runner::run_kernel(&cfg, dir.path()).unwrap();
    let text = fs::read_to_string(&files[0]).unwrap();
    assert!(text.starts_with("tau,t,y,w\n"));
    // two positive times, 64 cells each
    assert_eq!(text.lines().count(), 1 + 2 * 64);
}

#[test]
fn particles_mode_emits_trajectories_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::parse(
        "beta = 1\nparticles_n = 2000\ndt = 1e-3\nt_end = 2\nsnapshot_count = 10\ngrid_n = 64\ntrajectory_particles = 3\n",
    )
    .unwrap();
    let files = runner::run_particles(&cfg, dir.path()).unwrap();
    assert_eq!(files.len(), 2);
    let traj = fs::read_to_string(&files[0]).unwrap();
    assert!(traj.starts_with("t,particle_id,z\n"));
    assert_eq!(traj.lines().count(), 1 + 11 * 3);
    let hist = fs::read_to_string(&files[1]).unwrap();
    assert_eq!(hist.lines().count(), 1 + 64);
}

#[test]
fn rates_sweep_writes_summary_rows_with_theory_column() {
    let dir = tempfile::tempdir().unwrap();
    // tiny, fast sweep; duplicates must be dropped with a warning
    let cfg = ExperimentConfig::parse(
        "beta_list = 0, 0.25, 0.25, 0.5, 0.75, 1\ngrid_n = 128\ntau_end = 1.5\n",
    )
    .unwrap();
    let files = runner::run_rates(&cfg, dir.path()).unwrap();
    let summary = fs::read_to_string(&files[1]).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "beta,fitted_exponent,theory_exponent,prefactor,r2");
    assert_eq!(lines.len(), 1 + 5, "one row per unique beta");
    // theory exponents: -1/2, -(1/4 - beta/2), -1/2, -(beta - 1/2)
    let theory: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(theory, vec![-0.5, -0.125, -0.5, -0.25, -0.5]);
    let jsonl = fs::read_to_string(&files[0]).unwrap();
    assert_eq!(jsonl.lines().count(), 5);
    assert!(jsonl.contains("\"certified\":true"));
}

#[test]
fn theory_exponent_table() {
    assert_eq!(runner::theory_exponent(0.0), (-0.5, false));
    assert_eq!(runner::theory_exponent(0.25), (-0.125, false));
    assert_eq!(runner::theory_exponent(0.5), (-0.5, false));
    assert_eq!(runner::theory_exponent(0.75), (-0.25, true));
    assert_eq!(runner::theory_exponent(1.0), (-0.5, true));
}

#[test]
fn resolve_out_root_priorities() {
    // config only
    let root = movingwall_cli::resolve_out_root(None, Some(std::path::Path::new("cfg_dir")));
    assert_eq!(root, std::path::PathBuf::from("cfg_dir"));
    // CLI flag beats config
    let root = movingwall_cli::resolve_out_root(
        Some(std::path::Path::new("flag_dir")),
        Some(std::path::Path::new("cfg_dir")),
    );
    assert_eq!(root, std::path::PathBuf::from("flag_dir"));
}
