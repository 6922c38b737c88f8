mod args;
mod commands;
mod grid;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            eprintln!("{}", CliError::Usage(first).to_line());
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Trainlen(a) => commands::trainlen(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Exact(a) => commands::exact(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::OneToTwo(a) => commands::one_to_two(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_line());
            ExitCode::from(e.exit_code())
        }
    }
}
