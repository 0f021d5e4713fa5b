//! Batch runner for the ground-state experiments of `curlcurl-core`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::{Experiment, RunConfig};
pub use error::CliError;
