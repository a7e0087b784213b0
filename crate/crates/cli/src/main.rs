use std::process::ExitCode;

use clap::Parser;
use pwshift_cli::{load_config, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = load_config(&cli).and_then(|config| run(&config));
    match outcome {
        Ok(summary) => {
            for f in &summary.result.failures {
                eprintln!("failed: {f}");
            }
            eprintln!(
                "{} records, {} failed; wrote {} files",
                summary.result.records.len(),
                summary.result.failures.len(),
                summary.written.len()
            );
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
