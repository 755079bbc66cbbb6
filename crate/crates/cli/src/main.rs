use clap::{Parser, ValueEnum};
use movingwall_cli::config::ExperimentConfig;
use movingwall_cli::{acceptance, resolve_out_root, runner};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Finite-volume run with diagnostics and plots.
    Solve,
    /// Exact-kernel tabulation for the linearly moving wall.
    Kernel,
    /// Reflected-walker ensemble: trajectories and histogram.
    Particles,
    /// Rate-fit sweep over a list of wall exponents.
    Rates,
    /// Run the acceptance suite and print a pass/fail table.
    Verify,
}

/// Numerical laboratory for diffusion against a moving, impermeable wall.
#[derive(Debug, Parser)]
#[command(name = "movingwall", version, about)]
struct Cli {
    /// What to run.
    #[arg(value_enum)]
    mode: Mode,
    /// Experiment configuration (flat `key = value` file). Required for
    /// every mode except `verify`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overridden by MOVINGWALL_OUT, overrides the
    /// config's `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker-thread cap for parallel sections.
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    #[cfg(feature = "parallel")]
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("movingwall: cannot configure {n} workers: {e}");
            return ExitCode::FAILURE;
        }
    }
    #[cfg(not(feature = "parallel"))]
    if cli.workers.is_some() {
        eprintln!("movingwall: built without the `parallel` feature; --workers ignored");
    }

    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("movingwall: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    if cli.mode == Mode::Verify {
        let out_root = resolve_out_root(cli.out.as_deref(), None);
        let seed = cli.seed.unwrap_or(42);
        let suite_dir = out_root.join("suite");
        let mut outcomes = acceptance::run_all(&suite_dir, seed)?;
        let repeat_dir = out_root.join("suite_repeat");
        outcomes.push(acceptance::criterion_10_determinism(
            &suite_dir,
            &repeat_dir,
            seed,
        )?);
        print!("{}", acceptance::format_table(&outcomes));
        return Ok(if outcomes.iter().all(|o| o.passed) {
            ExitCode::SUCCESS
        } else {
            ExitCode::FAILURE
        });
    }

    let config_path = cli
        .config
        .as_deref()
        .ok_or("this mode needs --config <path>")?;
    let mut cfg = ExperimentConfig::from_file(config_path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out_root = resolve_out_root(cli.out.as_deref(), cfg.out.as_deref());
    let files = match cli.mode {
        Mode::Solve => runner::run_solve(&cfg, &out_root)?,
        Mode::Kernel => runner::run_kernel(&cfg, &out_root)?,
        Mode::Particles => runner::run_particles(&cfg, &out_root)?,
        Mode::Rates => runner::run_rates(&cfg, &out_root)?,
        Mode::Verify => unreachable!(),
    };
    for f in files {
        println!("{}", f.display());
    }
    Ok(ExitCode::SUCCESS)
}
