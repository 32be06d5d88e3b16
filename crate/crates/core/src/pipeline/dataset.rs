//! The study shipped with the crate: its configuration and measured power
//! draw (W) for the nine runs, three replicates each.

use crate::error::Result;
use crate::taguchi::ResponseMatrix;

use super::config::{parse_config, PipelineConfig};

pub const STUDY_CONFIG: &str = include_str!("../../data/paper.config");
pub const STUDY_RESPONSES: &str = include_str!("../../data/paper_table2.csv");

pub fn study_config() -> Result<PipelineConfig> {
    parse_config(STUDY_CONFIG)
}

pub fn study_responses() -> Result<ResponseMatrix> {
    ResponseMatrix::from_csv(STUDY_RESPONSES.as_bytes(), 9)
}
