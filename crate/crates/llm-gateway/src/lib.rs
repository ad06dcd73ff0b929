//! Provider-agnostic access to text-generation and text-embedding backends.
//!
//! The pipeline talks to two traits, [`TextGenerator`] and [`TextEmbedder`].
//! Production backends speak a JSON-over-HTTP chat-completion wire format
//! ([`HttpChatProvider`]) and an embedding wire format
//! ([`HttpEmbeddingProvider`]); both retry transient failures with
//! exponential backoff and bound in-flight requests with a semaphore.
//!
//! Tests and offline runs use the fully deterministic [`ScriptedProvider`]
//! (fixtures keyed by stage and prompt digest) and [`SyntheticEmbedder`]
//! (L2-normalized hashed bag-of-words vectors). [`CachedGenerator`] adds a
//! filesystem response cache keyed by request hash so interrupted corpus
//! runs resume without re-prompting.

mod cache;
mod embedding;
mod error;
mod http;
mod request;
mod scripted;
mod semaphore;

pub use cache::CachedGenerator;
pub use embedding::{SyntheticEmbedder, SYNTHETIC_DIMENSION};
pub use error::GatewayError;
pub use http::{
    HttpChatProvider, HttpEmbeddingProvider, HttpResponse, HttpTransport, ProviderConfig,
    RetryPolicy, TransportFailure, UreqTransport,
};
pub use request::{EmbeddingVector, GenerationRequest, SamplingParams, StageParams, StageTag};
pub use scripted::{prompt_digest, FixtureEntry, ScriptedProvider};
pub use semaphore::Semaphore;

/// Completes one prompt into model response text.
pub trait TextGenerator: Send + Sync {
    fn complete(&self, request: &GenerationRequest) -> Result<String, GatewayError>;
}

/// Embeds a batch of texts, one vector per input, order-preserving.
pub trait TextEmbedder: Send + Sync {
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, GatewayError>;
}

impl<T: TextGenerator + ?Sized> TextGenerator for &T {
    fn complete(&self, request: &GenerationRequest) -> Result<String, GatewayError> {
        (**self).complete(request)
    }
}

impl<T: TextEmbedder + ?Sized> TextEmbedder for &T {
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, GatewayError> {
        (**self).embed(texts)
    }
}

impl<T: TextGenerator + ?Sized> TextGenerator for Box<T> {
    fn complete(&self, request: &GenerationRequest) -> Result<String, GatewayError> {
        (**self).complete(request)
    }
}

impl<T: TextEmbedder + ?Sized> TextEmbedder for Box<T> {
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, GatewayError> {
        (**self).embed(texts)
    }
}
