use std::process::ExitCode;

use clap::Parser;
use peelab::{run, Cli, EXIT_TRUNCATED};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) if out.truncated => {
            eprintln!("peelab: resource cap reached, output is partial");
            ExitCode::from(EXIT_TRUNCATED as u8)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("peelab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
