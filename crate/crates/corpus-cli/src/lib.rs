//! Command-line entry point: configuration resolution, corpus ingestion
//! and length filtering, the format-error / cycle statistics report, and
//! the command implementations behind the `evgraph` binary.

pub mod commands;
pub mod config;
pub mod ingest;
pub mod providers;
pub mod report;
pub mod stats;

pub use config::{CliOverrides, RunConfig};
pub use ingest::{filter_documents, load_corpus, ExcludedDocument};
pub use stats::{compute_format_stats, FormatStats, RelationBreakdown};
