use std::process::ExitCode;

use clap::Parser;

use eigenrate_cli::cli::{Cli, Sub};
use eigenrate_cli::{compare, emit, load_config, render, CliError};

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Sub::Compare {
            rate_file,
            mc_file,
            epsilon,
            output,
            format,
        } => {
            let table = compare::compare_files(&rate_file, &mc_file, epsilon)?;
            let echo = serde_json::json!({
                "command": "compare",
                "rate_file": rate_file,
                "mc_file": mc_file,
                "epsilon": epsilon,
            });
            emit(&table.render(format, &echo)?, output.as_deref())
        }
        Sub::Replay { config, output } => {
            let config = load_config(&std::fs::read_to_string(&config)?)?;
            let text = render(&config)?;
            emit(&text, output.as_deref().or(config.output.as_deref()))
        }
        sub => {
            let config = sub.into_config().expect("experiment subcommand");
            let text = render(&config)?;
            emit(&text, config.output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code())
        }
    }
}
