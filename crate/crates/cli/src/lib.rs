//! File formats and batch front end for `spectral-vote-core`: `.npy`
//! feature maps, PGM/PNG masks, run manifests and the CLI subcommands.

pub mod atomic;
pub mod commands;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod manifest;
pub mod masks;
pub mod npy;

pub use config::RunConfig;
pub use error::{CliError, Result};
