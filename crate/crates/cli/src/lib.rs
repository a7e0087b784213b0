//! Batch front-end for `pwshift-core`: sweeps over method, amplitude mode,
//! wave, screening and momentum, with CSV/JSON/gnuplot output and a sign
//! report.

pub mod config;
pub mod output;
pub mod report;
pub mod sweep;

use std::fs;
use std::path::PathBuf;

pub use config::{Cli, ConfigError, RawConfig, SweepConfig};
pub use output::{write_output, OutputError};
pub use report::{build_report, FigureReport};
pub use sweep::{run_sweep, SweepFailure, SweepResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Defaults, then `--config`, then flags.
pub fn load_config(cli: &Cli) -> Result<SweepConfig, RunError> {
    let mut raw = RawConfig::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).map_err(|source| {
            RunError::Output(OutputError::Io {
                path: path.clone(),
                source,
            })
        })?;
        raw.merge(RawConfig::parse_file_text(&text)?);
    }
    raw.merge(cli.overrides());
    Ok(raw.resolve()?)
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Output(#[from] OutputError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_VALIDATION,
            RunError::Output(_) => EXIT_IO,
        }
    }
}

#[derive(Debug)]
pub struct RunSummary {
    pub result: SweepResult,
    pub written: Vec<PathBuf>,
    pub report: Option<FigureReport>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.result.is_complete() {
            EXIT_OK
        } else {
            EXIT_PARTIAL
        }
    }
}

/// Sweep, write outputs and, if requested, the report files
/// `<stem>.report.md` and `<stem>.report.json` next to the table.
pub fn run(config: &SweepConfig) -> Result<RunSummary, RunError> {
    let result = run_sweep(config);
    let mut written = write_output(config, &result)?;
    let mut report = None;
    if config.figure_report {
        let rep = build_report(&result.records, config.mass);
        let stem = config
            .output
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "phase_shifts".into());
        for (ext, body) in [("report.md", rep.render()), ("report.json", rep.to_json())] {
            let p = config.output.with_file_name(format!("{stem}.{ext}"));
            fs::write(&p, body).map_err(|source| OutputError::Io {
                path: p.clone(),
                source,
            })?;
            written.push(p);
        }
        report = Some(rep);
    }
    Ok(RunSummary {
        result,
        written,
        report,
    })
}
