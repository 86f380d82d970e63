//! Batch front end: experiment configuration, harness dispatch and
//! deterministic CSV reports.

pub mod config;
pub mod report;
pub mod runner;

pub use config::{parse_config, ConfigError, Experiment, ExperimentConfig, PartialConfig};
pub use report::{emit_csv, render, ReportBundle, Row, Summary};
pub use runner::run_experiment;
