//! Command line front end for the independence toolkit.
//!
//! A problem file names a finite outcome space, partitions of it, and
//! measures, then lists tasks to run against them: independence checks,
//! measure extension, additivity and decomposition reports, and the
//! simulation experiments. `indep run file.json` executes every task
//! and prints one deterministic report.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod problem;
pub mod report;
pub mod run;

use problem::{Context, ProblemFile};
use report::Format;

/// The bundled two-coin example problem.
pub const COIN_EXAMPLE: &str = include_str!("../data/coin.json");

#[derive(Parser)]
#[command(name = "indep", version, about = "Independence checks and limit experiments on finite spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task in a problem file and report the results.
    Run(RunArgs),
    /// Print a bundled example problem file to stdout.
    Example {
        /// Which example; `coin` is the two-coin space.
        name: String,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Problem file (JSON).
    file: PathBuf,
    /// Emit the machine-readable JSON report.
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Emit the terse text report (the default).
    #[arg(long)]
    text: bool,
    /// Cap the worker thread pool (default: one worker per core).
    #[arg(long)]
    threads: Option<usize>,
    /// Write per-task CSV series into this directory.
    #[arg(long)]
    csv_dir: Option<PathBuf>,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl RunArgs {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            Format::Text
        }
    }
}

fn run_command(args: &RunArgs) -> anyhow::Result<u8> {
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| anyhow::anyhow!("setting up the thread pool: {e}"))?;
    }
    let text = fs::read_to_string(&args.file)
        .map_err(|e| anyhow::anyhow!("reading {}: {e}", args.file.display()))?;
    let file = ProblemFile::from_json(&text)?;
    let ctx = Context::build(&file)?;
    let runs = run::run_all(&file, &ctx);
    if let Some(dir) = &args.csv_dir {
        report::write_csv_dir(&runs, dir)?;
    }
    let rendered = report::render(&runs, args.format());
    match &args.output {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| anyhow::anyhow!("writing {}: {e}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(report::exit_code(&runs))
}

/// Entry point behind `main`; returns the process exit code. Exit 0
/// means every task ran and passed, 1 means some check failed, 2 means
/// something could not run at all.
pub fn cli_main() -> u8 {
    let cli = Cli::parse();
    match &cli.command {
        Command::Run(args) => match run_command(args) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e:#}");
                2
            }
        },
        Command::Example { name } => match name.as_str() {
            "coin" => {
                print!("{COIN_EXAMPLE}");
                0
            }
            other => {
                eprintln!("error: unknown example \"{other}\" (available: coin)");
                2
            }
        },
    }
}
