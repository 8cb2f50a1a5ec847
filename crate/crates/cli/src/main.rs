//! `sercm`: SER curves, representing functions, CM verdicts and fading-order
//! comparisons from constellation config files.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "sercm", version, about = "Symbol error rate analysis of multidimensional constellations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dimensions, distances and cone decomposition summary.
    Analyze(Common),
    /// SER against rho by the selected methods (CSV).
    SerCurve(Common),
    /// Complete-monotonicity verdict from a derivative scan (JSON).
    CmCheck(Common),
    /// Stochastic-order verdicts and fading-averaged SER for two fading models.
    FadingCompare(Common),
    /// Samples of the representing function (CSV `u,mu`).
    Mu(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Constellation or run configuration JSON.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; results go to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// MIN:MAX:COUNT:log|lin
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl From<sercm::Error> for CliError {
    fn from(e: sercm::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(c) => commands::analyze(c),
        Command::SerCurve(c) => commands::ser_curve(c),
        Command::CmCheck(c) => commands::cm_check(c),
        Command::FadingCompare(c) => commands::fading_compare(c),
        Command::Mu(c) => commands::mu(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
