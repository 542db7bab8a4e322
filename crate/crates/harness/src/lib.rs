//! Experiment harness around [`hesmooth_core`]: a rayon-backed run executor,
//! result-table files, the bundled reference tables, configuration and the
//! `hesmooth` command line.

#![warn(missing_debug_implementations)]

pub mod cli;
pub mod config;
mod error;
pub mod golden;
mod parallel;
pub mod scenario_id;
pub mod table_io;

pub use error::{CliError, ExitCode};
pub use parallel::Parallel;
