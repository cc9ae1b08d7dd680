use std::process::ExitCode;

use clap::Parser;
use torus_cpi_cli::{run, Cli, ExperimentConfig, Failure};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = ExperimentConfig::from_cli(cli)
        .map_err(Failure::from)
        .and_then(|cfg| Ok((run(&cfg)?, cfg.output)));
    let (outcome, output) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match &output {
        Some(path) => {
            if let Err(e) = outcome.table.write_atomic(path) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{}", outcome.table.render()),
    }
    for v in &outcome.violations {
        eprintln!("violation: {v}");
    }
    ExitCode::from(outcome.exit_code() as u8)
}
