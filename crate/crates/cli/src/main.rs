use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pmibound::config::OutputFormat;
use pmibound_cli::{load_config, run_mi_chain, run_verify, scenario_list, Overrides, Status};

#[derive(Parser)]
#[command(
    name = "pmibound",
    version,
    about = "Verify pointwise mutual information bounds on configured scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a pointwise bound over (x, theta) and report every point.
    Verify(RunArgs),
    /// Check MI <= averaged pointwise bound <= ensemble bound.
    MiChain(RunArgs),
    /// Built-in scenarios.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
}

#[derive(Subcommand)]
enum ScenarioAction {
    List,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Report destination (overrides output.path; stdout when neither is set).
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, value_name = "csv|json")]
    format: Option<OutputFormat>,
    /// Slack tolerance (overrides sweep.tolerance).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Prior grid nodes (overrides prior.grid).
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            output: self.output.clone(),
            format: self.format,
            tolerance: self.tolerance,
            grid: self.grid,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (args, verify) = match &cli.command {
        Command::Verify(a) => (a, true),
        Command::MiChain(a) => (a, false),
        Command::Scenario {
            action: ScenarioAction::List,
        } => {
            print!("{}", scenario_list());
            return ExitCode::SUCCESS;
        }
    };
    let run = if verify { run_verify } else { run_mi_chain };
    let result = load_config(&args.config, &args.overrides()).and_then(|c| run(&c));
    match result {
        Ok(r) => {
            eprintln!("{}", r.summary);
            ExitCode::from(r.status.code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Status::Fatal.code() as u8)
        }
    }
}
