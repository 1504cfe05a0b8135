use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = pancakes_cli::Cli::parse();
    match pancakes_cli::run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
