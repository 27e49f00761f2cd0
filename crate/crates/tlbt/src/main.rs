use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = tlbt::cli::Cli::parse();
    match tlbt::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
