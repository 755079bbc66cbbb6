//! Experiment modes: `solve`, `kernel`, `particles`, `rates`.
//!
//! Every mode writes deterministic artifacts (17-significant-digit CSV,
//! fixed-order SVG) into its output directory and returns the list of files
//! it created.

use crate::config::{ExperimentConfig, FrameChoice, ScheduleSpec};
use crate::svg::{Plot, Series};
use movingwall_core::diagnostics::{
    self, fit_rate, window_samples, DiagnosticsRow, RateFit, RateModel,
};
use movingwall_core::fv_solver::write_snapshots_csv;
use movingwall_core::kernels::{exact_solution_linear, CompactInitialData};
use movingwall_core::particles::{write_trajectories_csv, HistogramFrame, ParticleEnsemble};
use movingwall_core::{
    CoreError, FpProblem, Frame, Grid, Profile, Snapshot, Solver, Trajectory,
};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Mode(String),
}

pub type RunResult = Result<Vec<PathBuf>, RunError>;

/// Run a solver experiment and compute per-snapshot diagnostics against the
/// regime profile. Physical-frame snapshots are transformed to the
/// self-similar frame first (the L1 distance and entropy are invariant under
/// the mass-preserving rescaling, so diagnostics are comparable across
/// frames).
pub struct SolveOutput {
    pub problem: FpProblem,
    pub profile: Profile,
    pub trajectory: Trajectory,
    pub rows: Vec<DiagnosticsRow>,
}

pub fn execute_solve(cfg: &ExperimentConfig) -> Result<SolveOutput, RunError> {
    let problem = cfg.problem()?;
    let v0 = cfg.initial_data()?;
    let length = cfg
        .grid_l
        .unwrap_or_else(|| problem.default_length(v0.support()));
    let grid = Grid::new(cfg.grid_n, length)?;
    let horizon = cfg.horizon(&problem)?;
    let schedule = cfg.schedule_times(horizon);
    let mut solver = Solver::new(problem, grid, &v0)?;
    let trajectory = solver.run(&schedule, None)?;
    let profile = Profile::for_boundary(problem.boundary(), cfg.mass)?;
    let rows = diagnostics_rows(&problem, &profile, &trajectory)?;
    Ok(SolveOutput {
        problem,
        profile,
        trajectory,
        rows,
    })
}

/// Per-snapshot diagnostics in the self-similar frame.
pub fn diagnostics_rows(
    problem: &FpProblem,
    profile: &Profile,
    trajectory: &Trajectory,
) -> Result<Vec<DiagnosticsRow>, RunError> {
    let map = problem.boundary().scaling_map();
    let mut rows = Vec::with_capacity(trajectory.snapshots.len());
    for snap in &trajectory.snapshots {
        let rescaled;
        let view = if problem.frame() == Frame::PhysicalComoving {
            rescaled = Snapshot {
                tau: snap.tau,
                t: snap.t,
                field: snap.field.to_rescaled(&map, snap.t),
                tail_mass: snap.tail_mass,
                tail_warning: snap.tail_warning,
            };
            &rescaled
        } else {
            snap
        };
        rows.push(diagnostics::diagnose_snapshot(view, profile)?);
    }
    Ok(rows)
}

pub fn run_solve(cfg: &ExperimentConfig, out_dir: &Path) -> RunResult {
    fs::create_dir_all(out_dir)?;
    let out = execute_solve(cfg)?;
    let mut files = Vec::new();

    let snap_path = out_dir.join("snapshots.csv");
    let mut buf = Vec::new();
    write_snapshots_csv(&out.trajectory, &mut buf)?;
    fs::write(&snap_path, buf)?;
    files.push(snap_path);

    let diag_path = out_dir.join("diagnostics.csv");
    let mut buf = Vec::new();
    diagnostics::write_diagnostics_csv(&out.rows, &mut buf)?;
    fs::write(&diag_path, buf)?;
    files.push(diag_path);

    // density overlay: final snapshot vs the limit profile, rescaled frame
    let map = out.problem.boundary().scaling_map();
    let last = out
        .trajectory
        .snapshots
        .last()
        .expect("run produces at least one snapshot");
    let field = if out.problem.frame() == Frame::PhysicalComoving {
        last.field.to_rescaled(&map, last.t)
    } else {
        last.field.clone()
    };
    let g = *field.grid();
    let window = profile_window(&out.profile, g.length());
    let density = Plot {
        title: format!(
            "density vs limit profile (beta = {}, tau = {:.3})",
            out.problem.boundary().beta(),
            last.tau
        ),
        x_label: "y".into(),
        y_label: "w".into(),
        log_x: false,
        log_y: false,
        series: vec![
            Series {
                label: "solver".into(),
                points: field
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (g.center(i), *w))
                    .take_while(|(y, _)| *y <= window)
                    .collect(),
            },
            Series {
                label: "profile".into(),
                points: (0..g.n())
                    .map(|i| (g.center(i), out.profile.eval(g.center(i)).unwrap()))
                    .take_while(|(y, _)| *y <= window)
                    .collect(),
            },
        ],
    };
    let density_path = out_dir.join("density.svg");
    density.write_to(&density_path)?;
    files.push(density_path);

    let distance = Plot {
        title: "L1 distance to the self-similar profile".into(),
        x_label: "1 + t".into(),
        y_label: "L1 distance".into(),
        log_x: true,
        log_y: true,
        series: vec![Series {
            label: "measured".into(),
            points: out
                .rows
                .iter()
                .filter(|r| r.l1_to_profile > 0.0)
                .map(|r| (1.0 + r.t, r.l1_to_profile))
                .collect(),
        }],
    };
    let distance_path = out_dir.join("distance.svg");
    distance.write_to(&distance_path)?;
    files.push(distance_path);

    Ok(files)
}

/// Plot window: where the profile has decayed to ~1e-8 of its peak.
fn profile_window(profile: &Profile, length: f64) -> f64 {
    let target = 1e-8 * profile.w0();
    let mut y = length;
    let mut lo = 0.0;
    let mut hi = length;
    for _ in 0..60 {
        y = 0.5 * (lo + hi);
        if profile.eval(y).unwrap() > target {
            lo = y;
        } else {
            hi = y;
        }
    }
    y.max(length / 16.0)
}

pub fn run_kernel(cfg: &ExperimentConfig, out_dir: &Path) -> RunResult {
    if cfg.beta != 1.0 {
        return Err(RunError::Mode(format!(
            "kernel mode needs the linear wall (beta = 1), got beta = {}",
            cfg.beta
        )));
    }
    fs::create_dir_all(out_dir)?;
    let v0 = cfg.initial_data()?;
    let problem = FpProblem::physical_comoving(cfg.boundary()?);
    let length = cfg
        .grid_l
        .unwrap_or_else(|| problem.default_length(v0.support()));
    let grid = Grid::new(cfg.grid_n, length)?;
    let horizon = cfg.horizon(&problem)?;
    let times: Vec<f64> = cfg
        .schedule_times(horizon)
        .into_iter()
        .filter(|t| *t > 0.0)
        .collect();
    if times.is_empty() {
        return Err(RunError::Mode(
            "kernel mode needs at least one positive output time".into(),
        ));
    }
    let path = out_dir.join("kernel.csv");
    let mut out = String::from("tau,t,y,w\n");
    for &t in &times {
        let values = tabulate_kernel_solution(&v0, t, &grid, cfg.c, cfg.d)?;
        for (i, w) in values.iter().enumerate() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                t,
                t,
                grid.center(i),
                w
            ));
        }
    }
    fs::write(&path, out)?;
    Ok(vec![path])
}

fn tabulate_kernel_solution(
    v0: &CompactInitialData,
    t: f64,
    grid: &Grid,
    c: f64,
    d: f64,
) -> Result<Vec<f64>, CoreError> {
    #[cfg(feature = "parallel")]
    {
        (0..grid.n())
            .into_par_iter()
            .map(|i| exact_solution_linear(v0, t, grid.center(i), c, d))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..grid.n())
            .map(|i| exact_solution_linear(v0, t, grid.center(i), c, d))
            .collect()
    }
}

pub fn run_particles(cfg: &ExperimentConfig, out_dir: &Path) -> RunResult {
    fs::create_dir_all(out_dir)?;
    let bm = cfg.boundary()?;
    let t_end = cfg.t_end.unwrap_or(20.0);
    if cfg.tau_end.is_some() {
        return Err(RunError::Mode(
            "particles mode runs in physical time; use t_end".into(),
        ));
    }
    let mut ensemble = ParticleEnsemble::new(
        cfg.particles_n,
        0.0,
        cfg.d,
        bm,
        cfg.particle_dt,
        cfg.seed,
    )?;
    let times: Vec<f64> = match &cfg.schedule {
        ScheduleSpec::Explicit(v) => v.clone(),
        ScheduleSpec::Uniform(k) => (0..=*k).map(|j| t_end * j as f64 / *k as f64).collect(),
    };
    let n_track = cfg.trajectory_particles.min(cfg.particles_n);
    let mut tracks: Vec<Vec<f64>> = vec![Vec::with_capacity(times.len()); n_track];
    let mut recorded = Vec::with_capacity(times.len());
    for &t in &times {
        if t > ensemble.time() {
            ensemble.advance(t)?;
        }
        recorded.push(t);
        for (k, track) in tracks.iter_mut().enumerate() {
            track.push(ensemble.positions()[k]);
        }
        // reflection invariant at every recorded time
        let wall = bm.position(t)?;
        if ensemble.min_position() < wall {
            return Err(RunError::Mode(format!(
                "reflection invariant violated at t = {t}: min position {} < wall {wall}",
                ensemble.min_position()
            )));
        }
    }
    let mut files = Vec::new();
    let traj_path = out_dir.join("trajectories.csv");
    let mut buf = Vec::new();
    write_trajectories_csv(&recorded, &tracks, &mut buf)?;
    fs::write(&traj_path, buf)?;
    files.push(traj_path);

    // final-time comoving histogram
    let hist_l = cfg
        .grid_l
        .unwrap_or_else(|| (10.0 * (cfg.d * t_end).sqrt()).max(20.0 * cfg.d / cfg.c).max(5.0));
    let grid = Grid::new(cfg.grid_n.min(512), hist_l)?;
    let (field, clip) = ensemble.empirical_density(&grid, HistogramFrame::Comoving)?;
    let hist_path = out_dir.join("histogram.csv");
    let mut out = String::from("tau,t,y,w\n");
    for (i, w) in field.values().iter().enumerate() {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            t_end,
            t_end,
            grid.center(i),
            w
        ));
    }
    fs::write(&hist_path, out)?;
    files.push(hist_path);
    if clip.clipped > 0 {
        eprintln!(
            "particles: {} walkers ({:.3}% of mass) fell outside the histogram grid",
            clip.clipped,
            100.0 * clip.clipped_mass
        );
    }
    Ok(files)
}

/// Theoretical L1 decay exponent in `(1+t)` for the regime, and whether the
/// rate carries a logarithmic correction.
pub fn theory_exponent(beta: f64) -> (f64, bool) {
    if beta == 0.0 {
        (-0.5, false)
    } else if beta < 0.5 {
        (-(0.25 - beta / 2.0), false)
    } else if beta == 0.5 {
        (-0.5, false)
    } else {
        (-(beta - 0.5), true)
    }
}

#[derive(Debug)]
pub struct SweepEntry {
    pub beta: f64,
    pub result: Result<RateFit, String>,
}

pub fn run_rates(cfg: &ExperimentConfig, out_dir: &Path) -> RunResult {
    fs::create_dir_all(out_dir)?;
    // deduplicate, preserving first-seen order
    let mut betas: Vec<f64> = Vec::new();
    for &b in &cfg.beta_list {
        if betas.contains(&b) {
            eprintln!("rates: duplicate beta = {b} dropped");
        } else {
            betas.push(b);
        }
    }

    let fit_one = |beta: f64| -> Result<RateFit, String> {
        let mut sub = cfg.clone();
        sub.beta = beta;
        sub.frame = FrameChoice::Auto;
        sub.schedule = ScheduleSpec::Uniform(40);
        let out = execute_solve(&sub).map_err(|e| e.to_string())?;
        let times: Vec<f64> = out.rows.iter().map(|r| r.t).collect();
        let dists: Vec<f64> = out.rows.iter().map(|r| r.l1_to_profile).collect();
        let (tw, dw) = window_samples(&times, &dists);
        let model = if beta > 0.5 {
            RateModel::PowerLog
        } else {
            RateModel::Power
        };
        fit_rate(&tw, &dw, model).map_err(|e| e.to_string())
    };

    #[cfg(feature = "parallel")]
    let results: Vec<SweepEntry> = betas
        .par_iter()
        .map(|&beta| SweepEntry {
            beta,
            result: fit_one(beta),
        })
        .collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<SweepEntry> = betas
        .iter()
        .map(|&beta| SweepEntry {
            beta,
            result: fit_one(beta),
        })
        .collect();

    let mut files = Vec::new();
    let jsonl_path = out_dir.join("rates.jsonl");
    let mut jsonl = fs::File::create(&jsonl_path)?;
    let csv_path = out_dir.join("summary.csv");
    let mut csv = String::from("beta,fitted_exponent,theory_exponent,prefactor,r2\n");
    for entry in &results {
        let (theory, log_flag) = theory_exponent(entry.beta);
        match &entry.result {
            Ok(fit) => {
                let row = serde_json::json!({
                    "beta": entry.beta,
                    "fitted_exponent": fit.exponent,
                    "theory_exponent": theory,
                    "log_correction": log_flag,
                    "prefactor": fit.prefactor,
                    "r_squared": fit.r_squared,
                    "window": [fit.window.0, fit.window.1],
                    "n_samples": fit.n_samples,
                    "certified": entry.beta <= 1.0,
                });
                writeln!(jsonl, "{row}")?;
                csv.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                    entry.beta, fit.exponent, theory, fit.prefactor, fit.r_squared
                ));
            }
            Err(msg) => {
                eprintln!("rates: beta = {} failed: {msg}", entry.beta);
                let row = serde_json::json!({ "beta": entry.beta, "error": msg });
                writeln!(jsonl, "{row}")?;
            }
        }
    }
    fs::write(&csv_path, csv)?;
    files.push(jsonl_path);
    files.push(csv_path);
    Ok(files)
}
