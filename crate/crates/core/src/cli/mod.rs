//! Batch driver behind the `casimir-sat` binary.

pub mod config;
pub mod dataset;
pub mod run;

use crate::error::{Result, EXIT_VALIDATION};
use crate::lifshitz::ResultTable;
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "casimir-sat", version, about = "Casimir and Casimir-Polder calculations with saturated mode statistics")]
pub struct Cli {
    /// Worker threads for the separation grid (output does not depend on it).
    #[arg(long, global = true, default_value_t = default_workers())]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the configured quantity over separations and saturation settings.
    Run { config: PathBuf },
    /// Residuals of a result table (CSV or JSON) against an experimental dataset.
    Compare { result: PathBuf, dataset: PathBuf },
    /// Real normal-mode frequencies of lossless plasma plates.
    Dispersion { config: PathBuf },
    /// Run the cartesian product of the [sweep] lists.
    Sweep { config: PathBuf },
}

/// Reads a result table, choosing the format by extension.
pub fn read_table(path: &Path) -> Result<ResultTable> {
    let text = std::fs::read_to_string(path).map_err(|source| crate::Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    if path.extension().is_some_and(|e| e == "json") {
        ResultTable::from_json(&text)
    } else {
        ResultTable::from_csv(&text)
    }
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { config } => {
            let out = run::run(&config::RunConfig::load(config)?, cli.workers)?;
            println!("{}", out.csv.display());
        }
        Command::Sweep { config } => {
            let out = run::sweep(&config::RunConfig::load(config)?, cli.workers)?;
            println!("{}", out.csv.display());
        }
        Command::Dispersion { config } => {
            let out = run::dispersion(&config::RunConfig::load(config)?, cli.workers)?;
            println!("{}", out.display());
        }
        Command::Compare { result, dataset } => {
            let table = read_table(result)?;
            let ds = dataset::ExperimentDataset::from_file(dataset)?;
            for r in dataset::compare(&table, &ds)? {
                println!("{}", r.to_text());
            }
        }
    }
    Ok(())
}

/// Parses arguments, runs the subcommand and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
