//! `quasiperm`: discrepancy, pattern and symmetry reports as JSON (or CSV).
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input, 3 internal failure.

mod commands;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::report::{emit, Format, Report};

#[derive(Debug, Parser)]
#[command(name = "quasiperm", version, about = "Discrepancy and pattern statistics for sets in Z_n and permutations")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "QUASIPERM_THREADS")]
    threads: Option<usize>,
    /// Emit JSON (the default).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit `path,value` rows instead of JSON.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Discrepancy and Fourier statistics of a subset of Z_n.
    AnalyzeSet(commands::AnalyzeSetArgs),
    /// Exact (or sampled) discrepancy of a permutation.
    AnalyzePerm(commands::AnalyzePermArgs),
    /// Occurrence counts of every pattern of length m.
    PatternCount(commands::PatternCountArgs),
    /// The inclusion matrices B_m and A_m with their spectral facts.
    Matrix(commands::MatrixArgs),
    /// Product permutations and their discrepancy bound.
    Construct(commands::ConstructArgs),
    /// Monte Carlo discrepancy of random permutations.
    RandomStats(commands::RandomStatsArgs),
    /// Exact distribution of the inversion count.
    Invdist(commands::InvdistArgs),
    /// Search for perfectly m-symmetric permutations.
    SearchSymmetric(commands::SearchArgs),
    /// Full balance certificate of a subset of Z_n.
    Certify(commands::CertifyArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::AnalyzeSet(_) => "analyze-set",
            Command::AnalyzePerm(_) => "analyze-perm",
            Command::PatternCount(_) => "pattern-count",
            Command::Matrix(_) => "matrix",
            Command::Construct(_) => "construct",
            Command::RandomStats(_) => "random-stats",
            Command::Invdist(_) => "invdist",
            Command::SearchSymmetric(_) => "search-symmetric",
            Command::Certify(_) => "certify",
        }
    }
}

/// Failures after argument parsing.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Internal(String),
}

impl From<quasiperm::Error> for Failure {
    fn from(e: quasiperm::Error) -> Self {
        match e {
            quasiperm::Error::NotConverged { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(3);
        }
    }
    let format = if cli.csv { Format::Csv } else { Format::Json };

    let start = Instant::now();
    let outcome = commands::run(&cli.command);
    let elapsed_ms = start.elapsed().as_millis() as u64;
    match outcome {
        Ok(results) => {
            let report = Report {
                command: cli.command.name(),
                inputs: serde_json::to_value(&cli.command).unwrap_or_default(),
                results,
                version: env!("CARGO_PKG_VERSION"),
                elapsed_ms,
            };
            match emit(&report, format) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(3)
                }
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
