//! File formats and command-line front end for `tlbt-core`.

pub mod cli;
pub mod commands;
pub mod error;
pub mod mm;
pub mod output;
pub mod sidecar;

pub use commands::{run, run_from};
pub use error::CliError;
