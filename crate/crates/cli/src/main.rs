use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gmnse_cli::{load_config, run, CliError, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "gmnse", version, about = "Globally modified Navier-Stokes experiments on a periodic torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args)]
struct Global {
    /// TOML configuration; defaults apply to anything it omits.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Single seed (overrides `seeds`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for ensemble work; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Modes per axis (overrides `params.resolution`).
    #[arg(long, global = true)]
    resolution_override: Option<usize>,
    /// Repeat for more logging.
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Evolve seeded initial data and write norm series.
    Simulate,
    /// Check the energy, enstrophy and absorbing-ball inequalities.
    VerifyEstimates,
    /// Sample an attractor approximation after burn-in.
    Attractor,
    /// Box-counting dimension of the attractor sample.
    Dimension,
    /// Lipschitz and smoothing estimates for perturbed pairs.
    Smoothing,
    /// Time-regularity quotients along one trajectory.
    TimeRegularity,
    /// Exponential attraction rate toward the attractor sample.
    RateFit,
    /// Print the resolved configuration as TOML and exit.
    ShowConfig,
}

impl Command {
    fn experiment(self) -> Option<Experiment> {
        Some(match self {
            Self::Simulate => Experiment::Simulate,
            Self::VerifyEstimates => Experiment::VerifyEstimates,
            Self::Attractor => Experiment::Attractor,
            Self::Dimension => Experiment::Dimension,
            Self::Smoothing => Experiment::Smoothing,
            Self::TimeRegularity => Experiment::TimeRegularity,
            Self::RateFit => Experiment::RateFit,
            Self::ShowConfig => return None,
        })
    }
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let g = &cli.global;
    let mut config = match &g.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(e) = cli.command.experiment() {
        config.experiment = e;
    }
    if let Some(dir) = &g.output {
        config.output_dir = dir.clone();
    }
    if let Some(seed) = g.seed {
        config.seeds = vec![seed];
    }
    if let Some(m) = g.resolution_override {
        config.params.resolution = m;
    }
    Ok(config)
}

fn main_inner(cli: &Cli) -> Result<(), CliError> {
    if cli.global.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    let config = resolve(cli)?;
    if cli.command.experiment().is_none() {
        print!("{}", config.to_toml_string());
        return Ok(());
    }
    let manifest = run(&config)?;
    log::info!(
        "{} finished: {} files in {}",
        manifest.experiment,
        manifest.files.len(),
        config.output_dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match main_inner(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
