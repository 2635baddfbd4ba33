//! Reproducible experiment runner for the `eigenrate` toolkit.
//!
//! Every run is described by an [`ExperimentConfig`]. Outputs start with a
//! header carrying the tool version and the configuration as JSON, so any
//! output file can be fed back to `eigenrate replay` to regenerate it
//! byte for byte.

pub mod cli;
pub mod commands;
pub mod compare;
pub mod config;
pub mod error;
pub mod output;

use std::io::Write;
use std::path::Path;

pub use config::{AlphaGrid, Command, ExperimentConfig, Format};
pub use error::CliError;

/// Environment variable consulted for the default seed.
pub const SEED_ENV: &str = "EIGENRATE_SEED";
pub const DEFAULT_SEED: u64 = 1;

/// Runs a configuration and renders the full output text.
pub fn render(config: &ExperimentConfig) -> Result<String, CliError> {
    let table = commands::run(config)?;
    let echo = serde_json::to_value(config).expect("config serializes");
    table.render(config.format, &echo)
}

/// Writes `text` to `path`, or to stdout when `path` is `None`. Nothing is
/// written unless the whole text is available.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Extracts the configuration from a JSON file or from the header of a
/// previous CSV or JSON-lines output.
pub fn load_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('#') {
        let line = trimmed
            .lines()
            .find_map(|l| l.strip_prefix("# config: "))
            .ok_or_else(|| CliError::Usage("CSV header has no config line".into()))?;
        return ExperimentConfig::from_json(line);
    }
    let first = trimmed.lines().next().unwrap_or_default();
    if let Ok(value) = serde_json::from_str::<serde_json::Value>(first) {
        if let Some(config) = value.get("config") {
            return ExperimentConfig::from_json(&config.to_string());
        }
    }
    ExperimentConfig::from_json(text)
}
