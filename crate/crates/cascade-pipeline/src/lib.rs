//! Orchestration of the cascading generation pipeline.
//!
//! For one document: generate a summary, extract salient events from it,
//! then build the hierarchical, temporal, and causal relation graphs in
//! that order. Each graph goes through up to `max_rounds` refinement
//! rounds: render the code-completion prompt (re-inserting edges retained
//! so far and any finished prior graphs), parse the model's `add_edge`
//! calls, grade every newly proposed edge with the hallucination grader,
//! and merge the edges graded yes — rejecting anything that would break
//! the DAG. A round that retains nothing new stops the loop early.
//!
//! [`run_corpus`] runs documents independently with bounded parallelism,
//! writing canonical bundle JSON per document plus a manifest that makes
//! interrupted runs resumable.

mod config;
mod corpus;
mod pipeline;
pub mod scripting;
mod trace;

pub use config::PipelineConfig;
pub use corpus::{run_corpus, CorpusOutcome, CorpusRunConfig, ManifestEntry};
pub use pipeline::{
    generate_relation_graph, generate_salient_events, run_document, PipelineContext,
};
pub use trace::{GradeRecord, PipelineTrace, RelationTrace, RoundTrace};

use event_graph_core::RelationType;
use llm_gateway::StageTag;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("document {document_id} is empty")]
    EmptyDocument { document_id: String },

    #[error("document {document_id} has {words} words, below the minimum of {min}")]
    DocumentTooShort {
        document_id: String,
        words: usize,
        min: usize,
    },

    #[error("document {document_id} has {words} words, above the maximum of {max}")]
    DocumentTooLong {
        document_id: String,
        words: usize,
        max: usize,
    },

    #[error("document {document_id}: no salient events parsed from the event response")]
    NoSalientEvents { document_id: String },

    #[error("document {document_id}, stage {stage}{}: {source}", round_context(.relation, .round))]
    Gateway {
        document_id: String,
        stage: StageTag,
        relation: Option<RelationType>,
        round: Option<usize>,
        source: llm_gateway::GatewayError,
    },

    #[error(transparent)]
    Render(#[from] prompt_codegen::RenderError),

    #[error(transparent)]
    Graph(#[from] event_graph_core::GraphError),

    #[error("manifest or bundle io: {0}")]
    Io(#[from] std::io::Error),

    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
}

fn round_context(relation: &Option<RelationType>, round: &Option<usize>) -> String {
    match (relation, round) {
        (Some(rel), Some(round)) => format!(" ({rel}, round {round})"),
        (Some(rel), None) => format!(" ({rel})"),
        _ => String::new(),
    }
}
