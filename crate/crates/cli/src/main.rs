use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use symcontract_cli::{execute, render, write_file, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code as u8);
        }
    };
    let text = render(&outcome.report, cli.format);
    match &cli.output {
        Some(path) => {
            if let Err(f) = write_file(path, &text) {
                eprintln!("error: {}", f.message);
                return ExitCode::from(f.code as u8);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(outcome.code as u8)
}
