//! Experiment driver for the zero-range homopolymer model: seeded
//! experiments, goodness-of-fit statistics and CSV/JSON reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod stats;

pub use config::{ExperimentConfig, ExperimentId, Format};
pub use error::{DriverError, Result};
pub use experiments::{execute, run_experiment};
pub use report::ExperimentReport;
