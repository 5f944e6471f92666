//! Experiments, result files and the command line for crossing counts of
//! projected random geometric graphs. The model itself lives in
//! `planecross-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod selftest;

pub use config::ExperimentConfig;
pub use error::{ConfigError, RunError};
