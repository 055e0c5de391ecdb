//! Experiment harness: config files, batch execution and result files.

pub mod config;
pub mod experiment;
pub mod output;

pub use config::{load_config, parse_config, ExperimentConfig};
pub use experiment::{run_experiment, run_experiment_with, sweep, Manifest, RunOptions, DEFAULT_REPETITIONS};
pub use output::{ProtocolSummary, Summary, CSV_HEADER};
