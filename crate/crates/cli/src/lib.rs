//! Command-line surface for the HED scoring library: stream files with JSON
//! sidecars, JSON run reports, and the `score`, `compare`, `frontier`,
//! `simulate` and `table` commands.
//!
//! Exit status is 0 on success, 2 for usage or parse problems, 3 when the
//! input is well formed but violates a data invariant, and 1 when an output
//! file cannot be written.

#![forbid(unsafe_code)]

pub mod cli;
pub mod commands;
pub mod error;
pub mod report;
pub mod stream_io;
pub mod svg;

pub use cli::{Cli, Command};
pub use error::CliError;
pub use report::RunReport;

pub fn run(cli: &Cli) -> Result<RunReport, CliError> {
    match &cli.command {
        Command::Score(args) => commands::score::run(args),
        Command::Compare(args) => commands::compare::run(args),
        Command::Frontier(args) => commands::frontier::run(args),
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Table => Ok(commands::table::run()),
    }
}
