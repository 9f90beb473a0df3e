//! Command-line front end for the selectorate solver: config loading, the four
//! commands, and JSON/CSV/SVG rendering. `main.rs` only parses arguments and
//! writes what these functions return.

pub mod commands;
pub mod config;
pub mod doc;
pub mod report;
pub mod svg;

use std::path::PathBuf;

pub use commands::{run, run_oracle, run_report, run_solve, run_sweep, Emitted, Outcome};
pub use config::{Command, Format, Overrides, RegimeSelector, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl From<selectorate_core::Error> for CliError {
    fn from(e: selectorate_core::Error) -> Self {
        use selectorate_core::Error as E;
        match e {
            E::InvalidParams(_) | E::InvalidSweep(_) | E::Domain(_) => CliError::Config(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}
