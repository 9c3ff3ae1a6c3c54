//! `sphere-gas` — batch experiment runner.
//!
//! Subcommands:
//!
//! * `sample` — draw configurations with any of the four samplers and write
//!   them as CSV plus a JSON summary;
//! * `minimize` — multi-start minimization for one n, updating the ledger;
//! * `verify` — run bound-verification suites and emit JSON reports;
//! * `baselines` — run all four samplers and tabulate mean energies against
//!   the closed forms;
//! * `report` — re-render JSON reports as human-readable tables.
//!
//! Exit codes: 0 success, 1 assertion failure, 2 usage or config error.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

/// Environment variable naming the default ledger path.
pub const LEDGER_ENV: &str = "SPHERE_GAS_LEDGER";

#[derive(Debug, Parser)]
#[command(
    name = "sphere-gas",
    version,
    about = "Coulomb gas on the sphere: sampling, minimization, and bound checks"
)]
struct Cli {
    /// Cap on worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw configurations and write CSV + summary JSON.
    Sample(CommonArgs),
    /// Estimate the minimal energy for one n and update the ledger.
    Minimize(CommonArgs),
    /// Run verification checks and write JSON reports.
    Verify(CommonArgs),
    /// Tabulate sampler mean energies against the closed forms.
    Baselines(CommonArgs),
    /// Render JSON reports as tables.
    Report(ReportArgs),
}

#[derive(Debug, clap::Args)]
struct CommonArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Ledger JSON path (default: $SPHERE_GAS_LEDGER, then ./ledger.json).
    #[arg(long)]
    ledger: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct ReportArgs {
    /// JSON report files to render.
    files: Vec<PathBuf>,
    /// Optional JSON config listing report files under {"reports": [...]}.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the table here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accepted for interface uniformity; rendering is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

/// Error carrying its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: i32,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 1,
        }
    }
}

impl From<sphere_gas::Error> for CliError {
    fn from(e: sphere_gas::Error) -> Self {
        let code = match &e {
            sphere_gas::Error::MissingLedgerEntry(_)
            | sphere_gas::Error::InvalidParameter(_)
            | sphere_gas::Error::OutOfRange { .. }
            | sphere_gas::Error::TooFewPoints(_) => 2,
            _ => 1,
        };
        Self {
            message: e.to_string(),
            code,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::failure(format!("i/o: {e}"))
    }
}

fn ledger_path(args: &CommonArgs) -> PathBuf {
    args.ledger
        .clone()
        .or_else(|| std::env::var_os(LEDGER_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("ledger.json"))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::config(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Sample(args) => commands::sample::run(&args.config, &args.out, args.seed),
        Command::Minimize(args) => {
            let ledger = ledger_path(&args);
            commands::minimize::run(&args.config, &args.out, args.seed, &ledger)
        }
        Command::Verify(args) => {
            let ledger = ledger_path(&args);
            commands::verify::run(&args.config, &args.out, args.seed, &ledger)
        }
        Command::Baselines(args) => commands::baselines::run(&args.config, &args.out, args.seed),
        Command::Report(args) => {
            let mut files = args.files.clone();
            if let Some(config) = &args.config {
                files.extend(config::report_file_list(config)?);
            }
            commands::report::run(&files, args.out.as_deref())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
    }
}
