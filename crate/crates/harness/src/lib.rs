//! Reproducible experiments for the `decycle` statistics.
//!
//! A run reads an [`ExperimentConfig`](config::ExperimentConfig), executes one
//! mode and writes CSV data together with a JSON [`RunManifest`](output::RunManifest).
//! Output files are written all-or-nothing.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod stats;

pub use config::{parse_config, ExperimentConfig, Mode, ModelKind};
pub use error::{HarnessError, Result};
pub use run::{execute, run, RunOutput};
