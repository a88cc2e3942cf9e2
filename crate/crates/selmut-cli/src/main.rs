use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

mod run;
mod scenario;

use run::{run_scenario, Action};
use scenario::parse_scenario;

/// Scenario-driven runner for measure-valued selection-mutation dynamics.
#[derive(Parser)]
#[command(name = "selmut", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the trajectory described by a scenario
    Iterate(RunArgs),
    /// Compute the closed-form limit distribution for a scenario
    Limit(RunArgs),
    /// Run the verification suites for a scenario
    Verify(RunArgs),
    /// Run trajectory and limit and report the TV/Kolmogorov/Levy gaps
    Compare(RunArgs),
    /// Print the scenario file schema
    Schema,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (JSON)
    #[arg(long)]
    scenario: PathBuf,
    /// Directory for output files
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn dispatch(action: Action, args: &RunArgs) -> Result<()> {
    let config = parse_scenario(&args.scenario)?;
    let written = run_scenario(action, &config, &args.out_dir)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Iterate(args) => dispatch(Action::Iterate, args),
        Command::Limit(args) => dispatch(Action::Limit, args),
        Command::Verify(args) => dispatch(Action::Verify, args),
        Command::Compare(args) => dispatch(Action::Compare, args),
        Command::Schema => {
            println!("{}", scenario::SCHEMA);
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
