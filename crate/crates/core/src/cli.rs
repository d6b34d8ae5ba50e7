//! Command-line interface: four subcommands dispatching into the experiment
//! runner.
//!
//! Exit codes: 0 success, 1 hard verification failure, 2 configuration
//! error, 3 I/O error.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::experiments::{run_experiments, ExperimentConfig, Mode, RunOptions};

/// Environment variable overriding the worker count.
pub const JOBS_ENV: &str = "GAUSS_HECKE_JOBS";

#[derive(Parser)]
#[command(
    name = "gauss-hecke",
    about = "Exact counting experiments for Hecke sets over Z[i]",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Counting tables for S(Q, pi^nu, pi'^nu, M) over prime windows.
    Count(CommonArgs),
    /// Verification suites (polarization sweep, emptiness grid, oracles).
    Verify(CommonArgs),
    /// The matrix-exchange pipeline on toy windows.
    Pipeline(CommonArgs),
    /// Diagnostic formulas (spectral factor, amplification combination).
    Diag(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Path to the JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for results.csv and summary.json.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker pool size (overridden by GAUSS_HECKE_JOBS).
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed for randomized form samples.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    let (mode, args) = match &cli.command {
        Command::Count(a) => (Mode::Count, a),
        Command::Verify(a) => (Mode::Verify, a),
        Command::Pipeline(a) => (Mode::Pipeline, a),
        Command::Diag(a) => (Mode::Diag, a),
    };
    match execute(mode, args) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("verification failed (hard checks); see summary.json");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(mode: Mode, args: &CommonArgs) -> crate::error::Result<bool> {
    let cfg = ExperimentConfig::from_path(&args.config)?;
    if cfg.mode != mode {
        return Err(Error::InvalidConfig(format!(
            "config mode {:?} does not match the subcommand",
            cfg.mode
        )));
    }
    let jobs = std::env::var(JOBS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .or(args.jobs);
    let opts = RunOptions { out_dir: args.out.clone(), jobs, seed: args.seed };
    let outcome = run_experiments(&cfg, &opts)?;
    for report in &outcome.reports {
        for check in &report.checks {
            let tag = if check.pass { "pass" } else if check.soft { "soft-fail" } else { "FAIL" };
            println!("[{tag}] {}: {}", check.name, check.details);
        }
    }
    println!(
        "{} rows -> {} ({} hard failures)",
        outcome.rows.len(),
        outcome.csv_path.display(),
        outcome.hard_failures
    );
    Ok(outcome.ok())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 3,
        Error::Json(_) | Error::InvalidConfig(_) | Error::Parse(_) => 2,
        _ => 2,
    }
}
