use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dupnet::commands::{
    execute, LikelihoodSettings, PmcmcSettings, PosteriorSettings, RelvarSettings, SimulateSettings,
};
use dupnet::error::CliResult;

/// Likelihood estimation and inference for duplication-attachment graphs.
#[derive(Debug, Parser)]
#[command(name = "dupnet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Grow a graph under the DA model.
    Simulate(SimulateSettings),
    /// Estimate the likelihood over a parameter grid.
    Likelihood(LikelihoodSettings),
    /// Relative variance of the estimators across graph sizes.
    Relvar(RelvarSettings),
    /// Particle marginal Metropolis-Hastings.
    Pmcmc(PmcmcSettings),
    /// Exact grid posterior and rejection draws.
    PosteriorExact(PosteriorSettings),
}

fn run(command: Command) -> CliResult<std::path::PathBuf> {
    match command {
        Command::Simulate(s) => execute(s),
        Command::Likelihood(s) => execute(s),
        Command::Relvar(s) => execute(s),
        Command::Pmcmc(s) => execute(s),
        Command::PosteriorExact(s) => execute(s),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
