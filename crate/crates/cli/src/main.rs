//! `svc-ee`: batch experiments over the cache-enabled two-tier network model.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use svc_ee::objective::DEFAULT_THETA;

#[derive(Debug, Parser)]
#[command(name = "svc-ee", version, about = "Energy efficiency of layered video caching in two-tier networks")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Scenario file; keys it leaves out keep their default values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    /// Monte-Carlo network drops.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub drops: usize,
    /// Smoothness of the l0 surrogate used by Scheme I.
    #[arg(long, global = true, default_value_t = DEFAULT_THETA)]
    pub theta: f64,
    /// Position samples for the cooperative SBS integrals.
    #[arg(long, global = true, default_value_t = 200_000)]
    pub samples: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analytic success probabilities and rates against Monte-Carlo estimates.
    Validate(commands::validate::ValidateArgs),
    /// Analytic success probabilities and the rate table.
    Analyze(commands::analyze::AnalyzeArgs),
    /// Monte-Carlo success probabilities and the rate table.
    Simulate(commands::simulate::SimulateArgs),
    /// Maximize EE for one caching scheme.
    Optimize(commands::optimize::OptimizeArgs),
    /// EE of both schemes and the baselines over a parameter sweep.
    Compare(commands::compare::CompareArgs),
}

/// How a command ended when it did not error out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    ValidationFailed,
    NotConverged,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<svc_ee::Error>() {
        Some(e) if e.is_numeric() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match &cli.command {
        Command::Validate(a) => commands::validate::run(g, a),
        Command::Analyze(a) => commands::analyze::run(g, a),
        Command::Simulate(a) => commands::simulate::run(g, a),
        Command::Optimize(a) => commands::optimize::run(g, a),
        Command::Compare(a) => commands::compare::run(g, a),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => ExitCode::from(1),
        Ok(Outcome::NotConverged) => ExitCode::from(2),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
