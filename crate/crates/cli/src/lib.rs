//! Experiment runner for the `torus-cpi` binary.

use std::fmt;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub mod commands;
pub mod config;
pub mod inputs;
pub mod table;

pub use config::{Cli, ExperimentConfig};
pub use table::ResultTable;

/// Bad flags, config or names.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug)]
pub enum Failure {
    Usage(UsageError),
    Compute(torus_cpi::Error),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(e) => write!(f, "usage: {e}"),
            Failure::Compute(e) => write!(f, "computation failed: {e}"),
        }
    }
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e)
    }
}

impl From<torus_cpi::Error> for Failure {
    fn from(e: torus_cpi::Error) -> Self {
        Failure::Compute(e)
    }
}

/// A finished experiment: the table and any invariant it found broken.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: ResultTable,
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            2
        }
    }
}

/// Validates `config`, runs its command and stamps the metadata.
pub fn run(config: &ExperimentConfig) -> Result<Outcome, Failure> {
    let command = config.validate()?.to_string();
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let mut outcome = commands::dispatch(&command, config)?;
    let t = &mut outcome.table;
    let mut meta = vec![
        ("command".to_string(), command),
        ("version".to_string(), torus_cpi::VERSION.to_string()),
        (
            "config".to_string(),
            serde_json::to_string(config).expect("config serializes"),
        ),
        ("started_unix".to_string(), started.to_string()),
        ("wall_time_s".to_string(), format!("{:.3}", clock.elapsed().as_secs_f64())),
        ("violations".to_string(), outcome.violations.len().to_string()),
    ];
    meta.extend(t.metadata().iter().cloned());
    let mut stamped = ResultTable::new(&t.header().iter().map(String::as_str).collect::<Vec<_>>());
    for (k, v) in meta {
        stamped.meta(&k, v);
    }
    for r in t.rows() {
        stamped.push(r.clone());
    }
    outcome.table = stamped;
    Ok(outcome)
}
