//! Configuration, the shipped study, report generation and the CLI.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod report;

pub use config::{load_config, parse_config, OutputFormat, Parameter, PipelineConfig};
pub use report::{config_bounds, emit_report, ingest_responses, run_analysis, Report, RunWheel};
