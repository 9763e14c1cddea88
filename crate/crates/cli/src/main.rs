use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

use qfilter_core::xprmt::Format;

mod config;
mod run;

use config::{Experiment, Overrides, RunConfig, SEED_ENV};

/// Background-cancelling, frequency-selective sensor simulations.
#[derive(Parser)]
#[command(name = "qfilter", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Response versus control frequency over random backgrounds.
    Sweep,
    /// Residual of the first-order estimate versus field strength.
    Scaling,
    /// Collective detection probability and Fisher information versus N.
    Heisenberg,
    /// Single detection decision for given signal and background fields.
    Detect,
    /// Zero-signal invariance and operator algebra self-check.
    Check,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct Opts {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed (falls back to the QFILTER_SEED environment variable).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Integrator steps per period.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Trials (realizations) per grid point.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Data file format.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
}

fn execute(cli: Cli) -> Result<bool> {
    let experiment = match cli.command {
        Command::Sweep => Experiment::Sweep,
        Command::Scaling => Experiment::Scaling,
        Command::Heisenberg => Experiment::Heisenberg,
        Command::Detect => Experiment::Detect,
        Command::Check => Experiment::Check,
    };
    let file = match &cli.opts.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let overrides = Overrides {
        seed: cli.opts.seed,
        out: cli.opts.out,
        steps: cli.opts.steps,
        trials: cli.opts.trials,
        jobs: cli.opts.jobs,
        format: cli.opts.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }),
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    let cfg = file.resolve(experiment, &overrides, env_seed.as_deref())?;
    let report = run::run(experiment, &cfg)?;
    println!("{}", report.summary);
    eprintln!("artifacts: {}", report.dir.display());
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
