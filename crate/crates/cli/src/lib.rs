//! Experiment runner behind the `noma-mec` binary: configuration parsing,
//! sweep execution, and file outputs.

pub mod config;
pub mod output;
pub mod sweep;
