use std::process::ExitCode;

use clap::Parser;
use lemnis::{run, Cli, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&outcome.summary).unwrap_or_default());
            } else {
                print!("{}", outcome.text);
            }
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Status::Error.exit_code() as u8)
        }
    }
}
