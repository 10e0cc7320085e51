//! Library half of the `hydrofrac` binary: configuration files, the binary
//! checkpoint format, run manifests with checksums, CSV serialization, and
//! the subcommand implementations.
//!
//! The binary in `main.rs` is a thin argument-parsing shell over
//! [`commands`]; everything with behavior worth testing lives here.

pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod csvout;
pub mod error;
pub mod manifest;

pub use checkpoint::{Checkpoint, CheckpointError};
pub use config::{ConfigBuilder, ResolvedConfig};
pub use error::CliError;
pub use manifest::RunManifest;
