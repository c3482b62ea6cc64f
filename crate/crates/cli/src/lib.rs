//! Command-line front end for `scanvar`.

pub mod commands;
pub mod error;
pub mod model;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

pub use error::{CliError, Result};
pub use model::{load_model, ModelFile};

#[derive(Debug, Parser)]
#[command(name = "scanvar", version, about = "Exact and simulated variances of random-scan and deterministic-scan MCMC")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check row sums, signs and detailed balance of a model.
    Validate,
    /// λ sweep of both variances, the gap and its lower bound (k = 2).
    Compare,
    /// Deterministic-scan variances of a dominating (--model) and a
    /// dominated (--model-b) family, plus the path derivative.
    Peskun,
    /// λ → 1 variances and the summability report.
    Limit,
    /// Replicated Monte Carlo estimates against exact finite-horizon values.
    Simulate,
    /// Write the two-state example model and run `compare` on it.
    Demo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Resolvent,
    Series,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// Model file (JSON). For `demo`, where to write the example.
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Second model for `peskun`.
    #[arg(long = "model-b", global = true)]
    pub model_b: Option<PathBuf>,
    /// Discount factors in [0, 1), comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda: Option<Vec<f64>>,
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long = "series-terms", global = true)]
    pub series_terms: Option<usize>,
    /// Slack for every checked inequality; for `validate`, the row-sum and
    /// detailed-balance tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[arg(long, global = true)]
    pub replicas: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Runs one command; diagnostics go to standard error.
pub fn run(command: Command, flags: &Flags) -> Result<()> {
    match command {
        Command::Validate => commands::validate(flags),
        Command::Compare => commands::compare(flags),
        Command::Peskun => commands::peskun(flags),
        Command::Limit => commands::limit(flags),
        Command::Simulate => commands::simulate(flags),
        Command::Demo => commands::demo(flags),
    }
}

/// Parses `args` and maps the outcome to the documented exit codes.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command, &cli.flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
