use thiserror::Error;

/// Errors raised while constructing or validating events, edges, graphs,
/// and bundles.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("event text is empty after normalization")]
    EmptyEventText,

    #[error("self-loop edge on event \"{event}\"")]
    SelfLoop { event: String },

    #[error("event \"{event}\" is not a member of the graph's node set")]
    UnknownEvent { event: String },

    #[error("duplicate edge \"{head}\" -> \"{tail}\"")]
    DuplicateEdge { head: String, tail: String },

    #[error("edge set contains a cycle: {}", witness.join(" -> "))]
    CycleDetected { witness: Vec<String> },

    #[error("edge relation {found} does not match graph relation {expected}")]
    RelationMismatch { expected: String, found: String },

    #[error("unknown relation name \"{name}\"")]
    UnknownRelationName { name: String },

    #[error("the three relation graphs do not share one node set")]
    NodeSetMismatch,

    #[error("bundle json: {0}")]
    Json(#[from] serde_json::Error),
}
