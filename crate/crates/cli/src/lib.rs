//! Command-line pipelines for mixed-graph node classification: data
//! generation, kNN graph construction, mixed-graph extraction, NAC, label
//! propagation and realization sweeps, each output accompanied by a
//! replayable manifest.

pub mod cli;
pub mod commands;
pub mod error;
pub mod experiment;
pub mod formats;
pub mod manifest;

pub use cli::Cli;
pub use commands::execute;
pub use error::{CliError, CliResult};
