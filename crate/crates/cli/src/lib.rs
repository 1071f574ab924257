//! Command-line front end for `qwalk`.
//!
//! Every command reports on standard output as `key=value` lines and signals
//! success only through its exit code: 0 on success, 1 for invalid input or a
//! failed check, 2 for unreadable or malformed files and infeasible synthesis.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub mod commands;
pub mod files;

/// The CLI chapter of the guide, compiled as a doc-test.
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
pub struct GuideChapter;

/// Verification tolerance when `--tol` is not given.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-9;
/// POVM validation and synthesis tolerance when `--tol` is not given.
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {msg}")]
    Malformed { path: String, msg: String },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Malformed { .. } | CliError::Infeasible(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Main,
    Alt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SicAction {
    EmitPovm,
    EmitSchedule,
    Verify,
}

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Compile POVMs into quantum-walk programs and check them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a POVM file into a schedule file.
    Synthesize {
        #[arg(long)]
        povm: PathBuf,
        #[arg(long, value_enum, default_value = "main")]
        algo: Algo,
        #[arg(long)]
        out: PathBuf,
        /// Validation and synthesis tolerance.
        #[arg(long, default_value_t = DEFAULT_VALIDATION_TOL)]
        tol: f64,
    },
    /// Compare the measurement a schedule induces with a POVM file.
    Verify {
        #[arg(long)]
        povm: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        /// Largest accepted entrywise deviation.
        #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
        tol: f64,
    },
    /// Exact output distribution of a schedule, optionally with sampled shots.
    Simulate {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Qutrit SIC family: write its POVM or walk program, or check them.
    Sic {
        #[arg(value_enum)]
        action: SicAction,
        /// Fiducial phase; `verify` without it checks the grid kπ/6, k = 0..11.
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
        /// Output file for the emit actions; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
        tol: f64,
    },
}

/// Run a parsed command line, writing reports to `out`. Returns the exit code.
pub fn run(cli: Cli, out: &mut dyn std::io::Write) -> u8 {
    let result = match cli.command {
        Command::Synthesize { povm, algo, out: path, tol } => commands::synthesize(&povm, algo, &path, tol, out),
        Command::Verify { povm, schedule, tol } => commands::verify(&povm, &schedule, tol, out),
        Command::Simulate { schedule, state, shots, seed } => commands::simulate(&schedule, &state, shots, seed, out),
        Command::Sic { action, t, out: path, tol } => commands::sic(action, t, path.as_deref(), tol, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
