//! Core domain types for salient event relation graphs.
//!
//! An [`Event`] is a short natural-language string with normalized,
//! case-insensitive identity. Events are connected by typed, directed,
//! acyclic [`RelationGraph`]s (one per [`RelationType`]), and the three
//! graphs for one document are grouped into an [`EventGraphBundle`] with
//! a canonical JSON serialization.
//!
//! The module also provides the graph algorithms the rest of the toolkit
//! relies on: cycle detection over possibly-invalid candidate edge sets,
//! transitive closure, and cycle-safe edge merging.

mod bundle;
mod document;
mod error;
mod event;
mod graph;

pub use bundle::{BundleJson, EventGraphBundle, RelationJson};
pub use document::{split_sentences, DocumentRecord};
pub use error::GraphError;
pub use event::{Event, EventSource, RelationEdge, RelationType};
pub use graph::{
    detect_cycle, detect_cycle_in_pairs, transitive_closure, MergeOutcome, RejectReason,
    RejectedEdge, RelationGraph,
};
