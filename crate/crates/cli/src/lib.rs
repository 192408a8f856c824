//! Command-line driver and file formats for `biphoton-core`: TOML run
//! configuration, long-format CSV output, run manifests and parallel sweeps.

pub mod cli;
pub mod config;
pub mod output;
pub mod parallel;
pub mod phase;

pub use cli::{run, run_with, ExitCode};
