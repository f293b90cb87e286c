use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use hed_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            // a closed pipe downstream is not a failure of the run
            let _ = writeln!(std::io::stdout().lock(), "{}", report.to_json_pretty());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
