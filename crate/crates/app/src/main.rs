use std::process::ExitCode;

use clap::Parser;
use dosefind_app::cli::Cli;

fn main() -> ExitCode {
    match dosefind_app::run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
