//! `nngp`: validity scans, 1-D kriging-weight comparisons, benchmarks and
//! predictions with NNGP and Matérn kernels.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::{BenchArgs, CompareArgs, PredictArgs, ScanArgs, Usage};
use config::{pick, pick_opt, ConfigFile};
use output::{write_text, Format};

#[derive(Debug, Parser)]
#[command(name = "nngp", version, about = "Gaussian-process studies with NNGP and Matérn kernels")]
struct Cli {
    /// key = value settings file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Positive-definiteness and flatness of NNGP kernels over a (sigma_a, sigma_b) grid.
    ScanValidity(ScanArgs),
    /// Closest Matérn 3/2 kriging weights to an NNGP kernel on 1-D designs.
    #[command(name = "compare-1d")]
    Compare1d(CompareArgs),
    /// NNGP, fixed Matérn 3/2 and varied Matérn arms on a benchmark case.
    Benchmark(BenchArgs),
    /// Posterior mean and standard deviation at test inputs.
    Predict(PredictArgs),
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let out = pick_opt(cli.out, &file, "out")?;
    let format = pick(cli.format, &file, "format", Format::Csv)?;
    let output = match cli.command {
        Command::ScanValidity(a) => commands::scan(a, &file)?,
        Command::Compare1d(a) => commands::compare(a, &file)?,
        Command::Predict(a) => commands::predict(a, &file)?,
        Command::Benchmark(a) => {
            let output = commands::benchmark(a, &file, cli.quiet)?;
            // the CSV table gets the full report alongside it
            if let (Format::Csv, Some(path)) = (format, &out) {
                write_text(Some(&path.with_extension("json")), &output.render_json()?)?;
            }
            output
        }
    };
    write_text(out.as_deref(), &output.render(format)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
