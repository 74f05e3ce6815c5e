//! `noetherlab`: simulate the three model systems, diagnose their first
//! integrals and check catalogued symmetries from a TOML run configuration.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 runtime or
//! numerical failure.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use config::{Format, Overrides, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, thiserror::Error)]
pub enum LabError {
    #[error("config: {0}")]
    Config(String),
    #[error("runtime: {0}")]
    Runtime(String),
}

impl LabError {
    pub fn runtime(e: noetherlab_core::Error) -> Self {
        LabError::Runtime(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            LabError::Config(_) => 2,
            LabError::Runtime(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "noetherlab", version, about = "First integrals and symmetries of superintegrable oscillators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Integrator tolerance, used for both `rtol` and `atol`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    horizon: Option<f64>,
    /// Seed for random test points in checks and reconstructions.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Integrate and write samples, events and run statistics.
    Simulate,
    /// Drift, jumps, apsidal angle and classification of each first integral.
    Diagnose,
    /// Residuals of named catalog generators and multipliers.
    Check,
    /// Rebuild first integrals from generators by line integration.
    Reconstruct,
    /// Diagnose over a list of values of one system parameter.
    Sweep,
}

fn execute(cli: Cli) -> Result<(), LabError> {
    let path = cli.config.ok_or_else(|| LabError::Config("--config PATH is required".into()))?;
    let overrides = Overrides { out: cli.out, format: cli.format, tol: cli.tol, horizon: cli.horizon, seed: cli.seed };
    let cfg = RunConfig::load(&path, &overrides)?;
    match cli.command {
        Command::Simulate => commands::simulate(&cfg),
        Command::Diagnose => commands::diagnose(&cfg),
        Command::Check => commands::check(&cfg),
        Command::Reconstruct => commands::reconstruct(&cfg),
        Command::Sweep => commands::sweep(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
