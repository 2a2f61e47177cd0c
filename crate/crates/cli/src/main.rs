mod args;
mod error;
mod experiment;
mod grid;
mod output;

use std::process::ExitCode;

use clap::Parser;
use log::warn;

use args::{Cli, Command};
use error::{CliError, EXIT_DIVERGED};

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run(args) => {
            let outcome = experiment::run_experiment(&args)?;
            println!("{}", outcome.summary());
            Ok(if outcome.diverged.is_some() {
                EXIT_DIVERGED
            } else {
                0
            })
        }
        Command::Grid(args) => {
            let report = grid::run_grid(&args.manifest, &args.out_dir)?;
            if report.failed > 0 {
                warn!(
                    "{} of {} entries failed, see {}",
                    report.failed,
                    report.total,
                    report.index.display()
                );
            }
            println!(
                "{} entries ({} failed, {} diverged), index -> {}",
                report.total,
                report.failed,
                report.diverged,
                report.index.display()
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("zodfo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
