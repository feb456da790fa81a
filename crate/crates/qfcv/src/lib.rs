//! Experiment harness, configuration and CSV plumbing around `qfcv-core`,
//! plus the subcommands of the `qfcv` binary.

pub mod app;
pub mod config;
pub mod csvio;
pub mod harness;

pub use qfcv_core as core;
