use std::process::ExitCode;

use clap::Parser;
use polariton_eit::cli::{configure_threads, error_json, execute, exit_code, write_atomic, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads()
        .and_then(|()| execute(&cli.command))
        .and_then(|(output, path)| {
            write_atomic(&path, &output.csv)?;
            println!("{}", output.summary);
            Ok(())
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
