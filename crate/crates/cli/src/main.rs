use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod svg;

use args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse_from(args::normalize_roi_args(std::env::args()));
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::EXIT_ERROR)
        }
    }
}
