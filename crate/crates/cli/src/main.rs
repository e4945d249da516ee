use std::process::ExitCode;

use clap::Parser;

use gbs_cli::{run, Cli, CliError, RunConfig};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|config| run(&config));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("gbs: {e}");
            ExitCode::from(CliError::exit_code(&e) as u8)
        }
    }
}
