use thiserror::Error;

use crate::request::StageTag;

/// Gateway failures, with transport, provider, and timeout errors kept
/// distinct so callers can tell a dead network from a refusing backend.
#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("transport failure after {attempts} attempt(s): {detail}")]
    Transport { attempts: u32, detail: String },

    #[error("provider error{}: {message}", status.map(|s| format!(" (http {s})")).unwrap_or_default())]
    Provider { status: Option<u16>, message: String },

    #[error("request timed out after {attempts} attempt(s)")]
    Timeout { attempts: u32 },

    #[error("fixture missing for stage {stage} with prompt digest {digest}")]
    FixtureMissing { stage: StageTag, digest: String },

    #[error("embed requires a non-empty list of non-empty texts")]
    EmptyEmbedInput,

    #[error("embedding dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero-norm embedding vector")]
    ZeroNorm,

    #[error("response cache io: {0}")]
    Cache(#[from] std::io::Error),

    #[error("malformed payload: {0}")]
    Payload(String),
}
