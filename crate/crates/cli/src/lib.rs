//! Experiment pipeline around `mmm-core`: synthetic cohorts, scripted data
//! collection, identification grids and the controller comparison.

pub mod config;
pub mod pipeline;
pub mod stats;

pub use config::ExperimentConfig;
