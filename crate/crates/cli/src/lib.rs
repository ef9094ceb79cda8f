//! File-to-file pipelines over the `nlcorr` analytics: `analyze`,
//! `nonlinearity`, `backtest` and `synth`.
//!
//! Exit codes: 0 ok, 2 usage, 3 data validation, 4 numeric failure.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;

use std::ffi::OsString;

use clap::error::ErrorKind;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION};

pub fn execute(command: &Command) -> CliResult<()> {
    match command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Nonlinearity(a) => commands::nonlinearity(a),
        Command::Backtest(a) => commands::backtest(a),
        Command::Synth(a) => commands::synth(a),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let cli = match args::parse(args) {
        Ok(cli) => cli,
        Err(args::ParseFailure::Clap(e)) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
        Err(args::ParseFailure::Config(e)) => {
            eprintln!("nlcorr: {e}");
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("nlcorr {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}
