use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use waveinv::config::{Experiment, RunConfig};
use waveinv::{commands, CliError, Outcome, RunContext};

/// Discrete wave-equation inverse-problem experiment driver.
#[derive(Parser)]
#[command(name = "waveinv", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stencil-calculus identity suite over seeded random inputs.
    Identities(CommonArgs),
    /// Carleman-ratio sweep over grids, s values and generator kinds.
    CarlemanSweep(CommonArgs),
    /// Stability ratios of the source and potential inverse problems.
    StabilitySweep(CommonArgs),
    /// Flux convergence toward the fine-grid surrogate.
    Consistency(CommonArgs),
    /// Projected-gradient potential recovery.
    Reconstruct(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// JSON run configuration (strict schema).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV files (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for independent sweep cells.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn build_context(args: &CommonArgs, expected: Experiment) -> Result<RunContext, CliError> {
    let config = RunConfig::load(&args.config)?;
    if config.experiment != expected {
        return Err(CliError::Config(format!(
            "config declares experiment `{}` but the `{}` command was invoked",
            config.experiment.name(),
            expected.name()
        )));
    }
    let out_dir = args
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let seed = args.seed.unwrap_or(config.seed);
    Ok(RunContext {
        config,
        out_dir,
        seed,
        jobs: args.jobs.max(1),
    })
}

fn dispatch() -> Result<Outcome, CliError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Identities(args) => {
            commands::identities::run(&build_context(args, Experiment::Identities)?)
        }
        Command::CarlemanSweep(args) => {
            commands::carleman::run(&build_context(args, Experiment::CarlemanSweep)?)
        }
        Command::StabilitySweep(args) => {
            commands::stability::run(&build_context(args, Experiment::StabilitySweep)?)
        }
        Command::Consistency(args) => {
            commands::consistency::run(&build_context(args, Experiment::Consistency)?)
        }
        Command::Reconstruct(args) => {
            commands::reconstruct::run(&build_context(args, Experiment::Reconstruct)?)
        }
    }
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::GateFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
