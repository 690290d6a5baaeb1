//! File formats, scenario configuration, synthetic models, parameter sweeps
//! and the `balbound` command-line tool.

pub mod cli;
pub mod config;
pub mod error;
pub mod mm;
pub mod report;
pub mod scenario;
pub mod sweep;
pub mod synth;

pub use error::{BenchError, Result};
