//! Command-line front end of `mtmbsp`: configuration, file ingestion, the
//! draws container and result emission.

pub mod commands;
pub mod config;
pub mod draws;
pub mod error;
pub mod input;
pub mod output;

pub use config::{Overrides, RunConfig};
pub use error::{CliError, Result};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "MTMBSP_THREADS";
