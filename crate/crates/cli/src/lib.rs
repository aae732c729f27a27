//! Command-line driver for `mortar-fem`: config files, presets, studies and
//! report emission (CSV, SVG, JSON).

pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use mortar_fem::Error;

use crate::commands::Context;
use crate::config::{ConfigError, LoadError};

#[derive(Debug, Parser)]
#[command(name = "mortar-fem", version, about = "Mortar finite elements for the heat equation on nonmatching grids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Named preset: table1, smooth, superconvergence, time-order, patch.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Output directory (overrides `out` in the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for study sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Solve once and write field samples and an error summary.
    Solve,
    /// Spatial convergence table and log-log plot.
    Convergence,
    /// Temporal convergence on a fixed mesh.
    TimeConvergence,
    /// Discrete negative-seminorm errors next to L2 errors.
    NegativeNorm,
    /// Mortar projection demo on a single interface.
    Project,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Convergence => "convergence",
            Command::TimeConvergence => "time-convergence",
            Command::NegativeNorm => "negative-norm",
            Command::Project => "project",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    /// Library error caused by the problem setup rather than the numerics.
    #[error("{context}: {source}")]
    Setup { context: String, source: Error },
    #[error("{context}: {source}")]
    Numerical { context: String, source: Error },
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io { path, source } => CliError::Io { path, source },
            LoadError::Config(c) => CliError::Config(c),
        }
    }
}

impl CliError {
    pub fn from_core(context: &str, source: Error) -> Self {
        let context = context.to_string();
        match source {
            Error::SingularSystem { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::NegativeQuadraticForm { .. }
            | Error::DegenerateCell
            | Error::EmptyQuadrature
            | Error::MismatchedExtent
            | Error::ChainedConstraint { .. }
            | Error::InvalidMultiplierSpace { .. } => CliError::Numerical { context, source },
            _ => CliError::Setup { context, source },
        }
    }

    /// 1 for config and IO errors, 2 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical { .. } => 2,
            _ => 1,
        }
    }
}

/// Runs one subcommand and returns its report.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let cfg = config::load(cli.config.as_deref(), cli.preset.as_deref())?;
    let out = cli.out.clone().unwrap_or_else(|| cfg.out.clone());
    let ctx = Context {
        command: cli.command.name(),
        out: &out,
        seed: cli.seed,
    };
    let go = || match cli.command {
        Command::Solve => commands::solve(&cfg, &ctx),
        Command::Convergence => commands::convergence(&cfg, &ctx),
        Command::TimeConvergence => commands::time_convergence(&cfg, &ctx),
        Command::NegativeNorm => commands::negative_norm(&cfg, &ctx),
        Command::Project => commands::project(&cfg, &ctx),
    };
    match cli.threads {
        Some(0) => Err(ConfigError::Invalid {
            field: "--threads".into(),
            message: "must be at least 1".into(),
        }
        .into()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(go),
        None => go(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_separate_setup_from_numerics() {
        assert_eq!(CliError::from_core("x", Error::NotPositiveDefinite { row: 3, pivot: -1.0 }).exit_code(), 2);
        assert_eq!(CliError::from_core("x", Error::NegativeQuadraticForm { value: -1.0 }).exit_code(), 2);
        assert_eq!(CliError::from_core("x", Error::TooFewResolutions).exit_code(), 1);
        assert_eq!(CliError::from_core("x", Error::MeshCount { expected: 3, got: 2 }).exit_code(), 1);
        assert_eq!(CliError::from(ConfigError::Empty).exit_code(), 1);
    }
}
