use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use layerscat_cli::error::EXIT_CHECKS_FAILED;
use layerscat_cli::{execute, Cli, Outcome};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.options.config.is_none() {
        Cli::command()
            .error(
                ErrorKind::MissingRequiredArgument,
                "the argument '--config <CONFIG>' is required",
            )
            .exit();
    }
    match execute(cli.command, &cli.options) {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => {
            eprintln!("error: one or more checks failed");
            ExitCode::from(EXIT_CHECKS_FAILED as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
