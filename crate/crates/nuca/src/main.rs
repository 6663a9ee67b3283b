use std::process::ExitCode;

use clap::Parser;
use nuca::cli::{run, Cli};
use nuca::schema::to_pretty;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", to_pretty(&report));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
