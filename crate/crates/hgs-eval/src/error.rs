use thiserror::Error;

#[derive(Debug, Error)]
pub enum HgsError {
    #[error("cost matrix is not square: row {row} has {got} columns, expected {expected}")]
    NotSquare {
        row: usize,
        got: usize,
        expected: usize,
    },

    #[error("cost matrix cell ({row}, {col}) is not finite")]
    NotFinite { row: usize, col: usize },

    #[error("cost matrix cell ({row}, {col}) is negative")]
    Negative { row: usize, col: usize },

    #[error("graphs carry different relation types: {left} vs {right}")]
    RelationMismatch { left: String, right: String },

    #[error("no embedding for event \"{event}\"")]
    MissingEmbedding { event: String },

    #[error(transparent)]
    Gateway(#[from] llm_gateway::GatewayError),
}
