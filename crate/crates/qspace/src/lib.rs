//! File formats, scheme descriptors and command implementations for the
//! `qspace` command-line tool. The numerics live in `qspace_core`.

pub mod commands;
pub mod descriptor;
mod error;
pub mod formats;
pub mod validate;

pub use error::CliError;
