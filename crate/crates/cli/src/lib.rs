//! Configuration, run modes and artifacts of the `sqgci` command.
//!
//! Exit codes: 0 pass, 2 configuration or artifact error, 3 assertion failure,
//! 4 resolution refusal, 1 for I/O failures.

pub mod config;
pub mod iterate;
pub mod oracle;
pub mod report;
pub mod summary;
pub mod verify;

use std::path::Path;

use sqgci_engine::EngineError;
use sqgci_spectral::dump::Dump;

pub use config::RunConfig;
pub use summary::{Check, Summary, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("artifacts: {0}")]
    Artifacts(String),
    #[error("io: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Artifacts(_) => 2,
            CliError::Assertion(_) => 3,
            CliError::Refused(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Resolution(_) | EngineError::Operator(_) => CliError::Refused(e.to_string()),
            EngineError::Config(_) => CliError::Config(e.to_string()),
            _ => CliError::Assertion(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Turns a summary with failed checks into an assertion error naming them.
pub fn verdict(s: &Summary) -> Result<(), CliError> {
    let failed: Vec<String> = s.failures().iter().map(|c| c.name.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failed.join(", ")))
    }
}

pub(crate) fn write_dump(out: &Path, name: &str, d: &Dump) -> Result<String, CliError> {
    let rel = format!("dumps/{name}.sfld");
    std::fs::create_dir_all(out.join("dumps"))?;
    d.save(&out.join(&rel)).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(rel)
}

pub(crate) fn write_rows<T: serde::Serialize>(out: &Path, name: &str, rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_path(out.join(name))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(name.to_string())
}
