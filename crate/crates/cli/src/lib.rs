//! Command-line driver: argument parsing, config layering, and output writing
//! for the `scu` binary.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

pub mod commands;
pub mod error;
pub mod output;

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "scu", version, about = "Stochastic combination of unitaries: sampling, simulation and resource estimates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Damped-GHZ multiple-quantum-coherence experiment.
    Ghz(commands::ghz::GhzArgs),
    /// TFIM CNOT-count and overhead sweep, plus the damping cost table.
    Estimate(commands::estimate::EstimateArgs),
    /// Sample a randomized simulation schedule for a Hamiltonian.
    Compile(commands::compile::CompileArgs),
    /// Decompose a channel into unitary and cross terms and draw samples.
    ChannelSample(commands::channel_sample::ChannelSampleArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Directory receiving the CSV/JSON outputs and manifest.
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// TOML file; its `[<subcommand>]` table is read, then flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Add a wall-clock timestamp to the manifest (outputs stay byte-identical).
    #[arg(long)]
    pub record_time: bool,
}

/// Reads table `section` of a TOML config, or the defaults when no file is given.
pub fn load_section<T: DeserializeOwned + Default>(path: Option<&Path>, section: &str) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut table: toml::Table = text
        .parse()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    match table.remove(section) {
        None => Ok(T::default()),
        Some(v) => v
            .try_into()
            .map_err(|e| CliError::Config(format!("{} [{section}]: {e}", path.display()))),
    }
}

/// Runs one parsed command and returns the files written.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    match cli.command {
        Command::Ghz(a) => commands::ghz::run(a),
        Command::Estimate(a) => commands::estimate::run(a),
        Command::Compile(a) => commands::compile::run(a),
        Command::ChannelSample(a) => commands::channel_sample::run(a),
    }
}
