//! Batch front end for `casimir-core`: configuration, unit handling,
//! dispatch and machine-readable output.

pub mod app;
pub mod config;
pub mod output;
pub mod run;
pub mod units;
