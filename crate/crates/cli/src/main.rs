//! `scd`: reproducible data files for energy-constrained distillability.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::RunConfig;
use output::Sink;

/// A problem with the run configuration or flags. Exits with status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Parser)]
#[command(
    name = "scd",
    version,
    about = "Monte Carlo estimates of energy-constrained distillability"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; never changes the numbers, only the wall time.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy, Debug)]
enum Command {
    /// Eigenvalues of H along a parameter sweep.
    Spectrum,
    /// SCD probability p against the field g.
    PCurve,
    /// Energy histogram of sampled states.
    Hist,
    /// Thermal WCEC boundary and concurrence over (g, beta).
    Thermal,
    /// Labels of the magnetized Bell-diagonal family on 2-D cross-sections.
    BellVolume,
    /// p over (theta, g) for two spin-1 particles.
    Qutrit,
    /// Distillable fraction of random two-qubit states by rank.
    Df,
    /// Per-energy-bin distillable fraction against the global one.
    Independence,
    /// Target energy range from the optimizer along the field grid.
    Prange,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::PCurve => "p-curve",
            Command::Hist => "hist",
            Command::Thermal => "thermal",
            Command::BellVolume => "bell-volume",
            Command::Qutrit => "qutrit",
            Command::Df => "df",
            Command::Independence => "independence",
            Command::Prange => "prange",
        }
    }
}

fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
    if cfg.workers == Some(0) {
        return Err(ConfigError("workers must be positive".into()).into());
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<PathBuf> {
    let started = Instant::now();
    let cfg = effective_config(cli)?;
    let command = cli.command.name();
    let stem = cfg.experiment.clone().unwrap_or_else(|| command.to_string());
    if stem.is_empty() || stem.contains(['/', '\\']) {
        return Err(ConfigError(format!("experiment `{stem}` is not a valid file stem")).into());
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().context("starting the worker pool")?;
    let out_dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let mut sink = Sink::new(&out_dir, &stem)?;
    pool.install(|| match cli.command {
        Command::Spectrum => commands::spectrum(&cfg, &mut sink),
        Command::PCurve => commands::p_curve(&cfg, &mut sink),
        Command::Hist => commands::hist(&cfg, &mut sink),
        Command::Thermal => commands::thermal(&cfg, &mut sink),
        Command::BellVolume => commands::bell_volume(&cfg, &mut sink),
        Command::Qutrit => commands::qutrit(&cfg, &mut sink),
        Command::Df => commands::df(&cfg, &mut sink),
        Command::Independence => commands::independence(&cfg, &mut sink),
        Command::Prange => commands::prange(&cfg, &mut sink),
    })?;
    sink.finish(command, &cfg, started)
}

/// 2 for configuration problems, 3 when a required optimizer call did not
/// converge, 1 for anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<scd_core::Error>() {
            return if matches!(e, scd_core::Error::NotConverged(_)) {
                3
            } else {
                2
            };
        }
        if cause.is::<ConfigError>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(manifest) => {
            eprintln!("wrote {}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("scd {}: {e:#}", cli.command.name());
            ExitCode::from(exit_code(&e))
        }
    }
}
