//! Command-line front end: reads a JSON run configuration, drives the solver
//! and the verification suite, and writes CSV artifacts.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_convergence, cmd_farfield, cmd_solve, cmd_verify, run_checks, Outcome};
pub use config::{parse_config, parse_config_str, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "layerscat",
    version,
    about = "Transmission scattering by a buried inhomogeneous obstacle"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Solve for the configured incident field; write densities and far field.
    Solve,
    /// Write the far field on the configured angular grid.
    Farfield,
    /// Run the selected checks and write checks.csv.
    Verify,
    /// Refinement studies against the reference solutions.
    Convergence,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// JSON run configuration (required).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding `output_dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Random seed, overriding `seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

/// Load the configuration, apply flag overrides and run `command`.
pub fn execute(command: Command, options: &Options) -> Result<Outcome, CliError> {
    let Some(path) = options.config.as_deref() else {
        return Err(CliError::Schema {
            path: "--config".into(),
            message: "a configuration file is required".into(),
        });
    };
    let mut cfg = parse_config(path)?;
    if let Some(out) = &options.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = options.seed {
        cfg.seed = seed;
    }
    if let Some(n) = options.threads {
        if n == 0 {
            return Err(CliError::Schema {
                path: "--threads".into(),
                message: "must be at least 1".into(),
            });
        }
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match command {
        Command::Solve => cmd_solve(&cfg),
        Command::Farfield => cmd_farfield(&cfg),
        Command::Verify => cmd_verify(&cfg),
        Command::Convergence => cmd_convergence(&cfg),
    }
}
