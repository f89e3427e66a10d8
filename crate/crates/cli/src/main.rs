//! `trimweight` command-line interface.
//!
//! Exit codes: 0 on success, 2 for invalid input (bad flags, unreadable or
//! malformed data), 3 for numerical failures such as separation or an empty
//! trimmed population. Errors are written to stderr as a JSON object.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use trimweight::simulation::{OutcomeDesign, PropensityDesign};
use trimweight::{CiMethod, WeightFamily};

use crate::report::ErrorReport;

#[derive(Debug, Parser)]
#[command(name = "trimweight", version, about = "Trimmed and smoothly weighted treatment-effect estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate a trimmed treatment effect from a CSV file.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo scenario and print the summary table.
    Simulate(SimulateArgs),
    /// Solve the data-driven cutoff for trimming the treated population.
    AttAlpha(AttAlphaArgs),
    /// Emit weight functions over a grid of propensity scores as CSV.
    Curves(CurvesArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the 0/1 treatment column.
    #[arg(long)]
    pub treatment: String,
    #[arg(long)]
    pub outcome: String,
    #[arg(long, default_value = "indicator")]
    pub weight: WeightFamily,
    #[arg(long, default_value_t = 0.1)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 0.9)]
    pub alpha2: f64,
    /// Cutoff for the treated-population families.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = trimweight::weights::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Use the outcome-regression augmented estimator.
    #[arg(long)]
    pub augmented: bool,
    /// Bootstrap replicates; 0 disables the bootstrap.
    #[arg(long, default_value_t = 100)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "normal")]
    pub ci: CiMethod,
    /// Aligned text instead of JSON.
    #[arg(long)]
    pub pretty: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub design: PropensityDesign,
    #[arg(long)]
    pub outcome: OutcomeDesign,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    /// Bootstrap replicates per replication; 0 skips variance estimation.
    #[arg(long, default_value_t = 100)]
    pub bootstrap: usize,
    #[arg(long, value_delimiter = ',', default_value = "1e-4,1e-5")]
    pub epsilon_grid: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 0.9)]
    pub alpha2: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the table as CSV to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub pretty: bool,
}

#[derive(Debug, Args)]
pub struct AttAlphaArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub treatment: String,
    /// Outcome column, excluded from the propensity covariates.
    #[arg(long)]
    pub outcome: Option<String>,
    #[arg(long)]
    pub pretty: bool,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long, default_value_t = 0.1)]
    pub alpha1: f64,
    #[arg(long, default_value_t = 0.9)]
    pub alpha2: f64,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Number of interior grid points on (0, 1).
    #[arg(long, default_value_t = 999)]
    pub points: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            return fail(ErrorReport::validation(e.render().to_string().trim_end()));
        }
    };
    let result = match cli.command {
        Command::Estimate(args) => commands::estimate(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::AttAlpha(args) => commands::att_alpha(args),
        Command::Curves(args) => commands::curves(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(ErrorReport::from(&e)),
    }
}

fn fail(report: ErrorReport) -> ExitCode {
    eprintln!("{}", serde_json::to_string(&report).expect("serializable error"));
    ExitCode::from(report.exit_code())
}
