//! Command-line surface.
//!
//! Exit codes: 0 success, 2 bad flags, 3 data errors, 4 unsupported
//! analytic combinations, 1 anything else (e.g. an unwritable output).

pub mod args;
mod commands;
pub mod report;

use std::ffi::OsString;

use clap::{Parser, Subcommand};

pub use commands::{AnalyticArgs, ConvergeArgs, EstimateArgs, SynthArgs};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(
    name = "concentrate",
    version,
    about = "Estimate concentration of measure with half spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Repeated train/test estimates on one dataset.
    Estimate(EstimateArgs),
    /// Test adversarial risk as a function of training-set size.
    Converge(ConvergeArgs),
    /// Write synthetic Gaussian samples in gauss-bin format.
    Synth(SynthArgs),
    /// Closed-form Gaussian concentration.
    Analytic(AnalyticArgs),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(concentrate::Error),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Unsupported(_) => 4,
            CliError::Output(_) => 1,
        }
    }
}

/// Parses `argv` and runs the command, returning the process exit code.
/// Diagnostics go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Estimate(a) => commands::estimate(a),
        Command::Converge(a) => commands::converge(a),
        Command::Synth(a) => commands::synth(a),
        Command::Analytic(a) => commands::analytic(a),
    }
}
