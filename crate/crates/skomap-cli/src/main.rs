//! `skomap` — solve reflection problems on CSV paths, verify solver
//! conditions over seeded suites, and run the pinch experiments.
//!
//! Exit codes: 0 success / suite passed, 1 suite or check failure,
//! 2 usage or parse problem, 3 domain-invariant violation in the inputs.

mod conditions;
mod config;
mod experiments;
mod solve;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use skomap::error::Error;

#[derive(Parser)]
#[command(name = "skomap", version, about)]
struct Cli {
    /// Worker threads for experiment seeds (falls back to SKOMAP_THREADS,
    /// then to one thread per core).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Constrain a path between two boundary paths; writes phi/eta/eta_l/
    /// eta_r CSV files and a JSON summary.
    Solve {
        /// Input path CSV (header `t,value`).
        psi: PathBuf,
        /// Lower boundary CSV (`-inf` allowed).
        lower: PathBuf,
        /// Upper boundary CSV (`inf` allowed).
        upper: PathBuf,
        /// Output prefix; files are written as `<PREFIX>phi.csv` etc.
        #[arg(long)]
        out: String,
    },
    /// Run a seeded verification suite and print its JSON report.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Inclusive seed range, e.g. 0..499.
        #[arg(long, default_value = "0..499")]
        seeds: String,
        /// Violation tolerance (default 1e-9; the oracle suite uses 1e-12).
        #[arg(long)]
        tol: Option<f64>,
        /// Plant a defect before verification; the suite must then fail.
        /// CI sanity aid.
        #[arg(long, hide = true)]
        inject_bug: bool,
    },
    /// Cusp sweep: variation of the constraint term across resolutions for
    /// each exponent in the config.
    Cusp {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for variation.csv and summary.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Thorn experiments: per-excursion and full-horizon variation trends.
    Thorn {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for excursion.csv, horizon.csv and summary.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the comb or box conditions of a boundary family.
    CheckConditions {
        #[arg(long)]
        config: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Suite {
    Esp,
    Sp,
    Oracle,
    MonoDomain,
    MonoInput,
    MonoConstraint,
}

/// Failure modes mapped onto exit codes.
pub enum CliError {
    /// A suite or condition check ran and failed.
    Failed,
    Lib(Error),
    Json(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

pub type CliResult = Result<(), CliError>;

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Failed => 1,
        CliError::Json(_) => 2,
        CliError::Lib(e) => match e {
            Error::Domain(_) => 3,
            Error::Usage(_) | Error::Parse { .. } | Error::Io(_) => 2,
            Error::Solver(_) => 1,
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let threads = cli.threads.or_else(|| {
        std::env::var("SKOMAP_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot build thread pool: {e}");
            return ExitCode::from(2);
        }
    }

    let result = match cli.command {
        Command::Solve {
            psi,
            lower,
            upper,
            out,
        } => solve::run(&psi, &lower, &upper, &out),
        Command::Verify {
            suite,
            seeds,
            tol,
            inject_bug,
        } => verify::run(suite, &seeds, tol, inject_bug),
        Command::Cusp { config, out } => experiments::run_cusp(&config, &out),
        Command::Thorn { config, out } => experiments::run_thorn(&config, &out),
        Command::CheckConditions { config, out } => conditions::run(&config, out.as_deref()),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Failed => {}
                CliError::Lib(err) => eprintln!("error: {err}"),
                CliError::Json(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
