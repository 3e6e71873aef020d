//! Batch frontend: ingest logs, simulate worlds, emit recommendations,
//! evaluate experiments and render reports.
//!
//! Exit codes: 0 success, 1 validation failure (bad data, bad config,
//! unknown ids, date order), 2 I/O failure (missing or unreadable files).

mod commands;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{cmd_evaluate, cmd_ingest, cmd_recommend, cmd_report, cmd_simulate, CliError};

#[derive(Parser)]
#[command(
    name = "ribbonlab",
    version,
    about = "Recommender ribbons and an offline A/B/C experiment harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate log files and print acceptance statistics.
    Ingest(commands::IngestArgs),
    /// Generate a synthetic catalog, children and 45-day logs.
    Simulate(commands::SimulateArgs),
    /// Emit recs.jsonl for a set of children as of a date.
    Recommend(commands::RecommendArgs),
    /// Run the full evaluation pipeline and write report.json.
    Evaluate(commands::EvaluateArgs),
    /// Render a report.json as plain-text tables.
    Report(commands::ReportArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(args) => cmd_ingest(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Recommend(args) => cmd_recommend(&args),
        Command::Evaluate(args) => cmd_evaluate(&args),
        Command::Report(args) => cmd_report(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}
