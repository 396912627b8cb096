use std::process::ExitCode;

use clap::Parser;
use edgegas_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("edgegas: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
