//! Configuration, ingestion, and CSV output for the `sparsir` command line.

pub mod cli;
pub mod commands;
pub mod config;
pub mod emit;
mod error;
pub mod ingest;
pub mod manifest;
pub mod recover;

pub use error::{CliError, CliResult};
pub use ingest::{ingest_csv, read_matrix_csv, IngestedTable};
pub use recover::{recover_real, RecoverOptions, RecoveryReport, VariableReport};

/// Stamp written into every run manifest.
pub const VERSION_STAMP: &str = concat!("sparsir ", env!("CARGO_PKG_VERSION"));
