//! Scenario files and the experiment runner behind the `sim` binary.

mod config;
mod output;
mod run;

pub use config::{line_of, parse_config, CalibratedDetuning, ExperimentKind, ScenarioConfig};
pub use output::{read_table, Table};
pub use run::{run_scenario, OutputFile, RunSummary};

use thiserror::Error;

/// Problems with the scenario text itself.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("parse error{}{}: {message}", key.as_ref().map(|k| format!(" at `{k}`")).unwrap_or_default(), fmt_line(*line))]
    Parse { key: Option<String>, line: Option<usize>, message: String },

    #[error("invalid value for `{key}`{}: {reason}", fmt_line(*line))]
    Validation { key: String, line: Option<usize>, reason: String },
}

fn fmt_line(line: Option<usize>) -> String {
    line.map(|l| format!(" (line {l})")).unwrap_or_default()
}

/// Anything that can stop a scenario run.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("simulation failed: {0}")]
    Simulation(#[from] crate::Error),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
