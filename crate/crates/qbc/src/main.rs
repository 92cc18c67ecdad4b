use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = qbc::Cli::parse();
    match qbc::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
