//! Experiment harness around `safescale-core`: data collection, plateau
//! estimation, predictor training, policy evaluation and report generation,
//! all operating on a self-describing experiment directory with a content
//! manifest.

pub mod harness;
pub mod manifest;
pub mod report;
