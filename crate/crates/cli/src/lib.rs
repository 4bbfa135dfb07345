//! Library half of the `videomerge` binary: configuration files, the VMLT
//! latent container, run manifests, and the subcommand implementations,
//! exposed so integration tests can drive them directly.

pub mod commands;
pub mod config;
pub mod error;
pub mod http;
pub mod manifest;
pub mod vmlt;

pub use error::{CliError, Result};
