//! `dirmod` command-line front end.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 bad flags or session
//! parameters, 3 unreadable or invalid input files (patterns, sweep CSVs,
//! manifests).

mod cli;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let args = cli::Cli::parse();
    match cli::run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
