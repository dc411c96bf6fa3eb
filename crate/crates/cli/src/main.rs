use std::process::ExitCode;

use clap::Parser;
use fs_core::Execution;

mod args;
mod commands;
mod io;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = args::Cli::parse();
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    let result = commands::run(&cli.command, exec).and_then(|r| {
        let header = io::header(&argv, r.seed, &r.summary);
        io::emit(commands::output_of(&cli.command), &header, &r.body)?;
        Ok(r.exit)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("fs: {e}");
            ExitCode::from(2)
        }
    }
}
