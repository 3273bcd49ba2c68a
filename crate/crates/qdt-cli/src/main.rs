mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Overrides, RunError};
use config::ExperimentConfig;
use report::{Format, ReportDocument};

#[derive(Parser)]
#[command(name = "qdt", version, about = "Quantum decision theory experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predict choice probabilities for the configured lotteries
    Predict(RunArgs),
    /// Check the quantum invariant battery for the configured state
    Validate(RunArgs),
    /// Estimate the aggregate attraction magnitude by Monte Carlo
    Quarterlaw(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML)
    config: PathBuf,

    /// Monte Carlo seed (overrides the config)
    #[arg(long)]
    seed: Option<u64>,

    /// Numerical tolerance for check rows
    #[arg(long)]
    tol: Option<f64>,

    /// Attraction ranking threshold (overrides the config)
    #[arg(long)]
    theta: Option<f64>,

    /// Output format
    #[arg(long, value_enum, default_value = "human")]
    format: Format,

    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, runner): (&RunArgs, RunnerFn) = match &cli.command {
        Command::Predict(args) => (args, commands::run_predict),
        Command::Validate(args) => (args, commands::run_validate),
        Command::Quarterlaw(args) => (args, commands::run_quarterlaw),
    };
    execute(args, runner)
}

type RunnerFn = fn(&ExperimentConfig, &Overrides) -> Result<ReportDocument, RunError>;

fn execute(args: &RunArgs, runner: RunnerFn) -> ExitCode {
    let config = match ExperimentConfig::load(&args.config) {
        Ok(config) => config,
        Err(error) => {
            eprintln!("error: {error}");
            return ExitCode::from(2);
        }
    };
    let overrides = Overrides {
        seed: args.seed,
        tol: args.tol,
        theta: args.theta,
    };
    let doc = match runner(&config, &overrides) {
        Ok(doc) => doc,
        Err(error) => {
            eprintln!("error: {error}");
            return ExitCode::from(error.exit_code());
        }
    };
    let rendered = doc.render(args.format);
    if let Some(path) = &args.out {
        if let Err(error) = std::fs::write(path, &rendered) {
            eprintln!("error: cannot write {}: {error}", path.display());
            return ExitCode::from(2);
        }
    } else {
        print!("{rendered}");
    }
    ExitCode::from(if doc.all_checks_pass() { 0 } else { 1 })
}
