use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::GatewayError;
use crate::request::{EmbeddingVector, GenerationRequest};
use crate::semaphore::Semaphore;
use crate::{TextEmbedder, TextGenerator};

/// Raw HTTP response handed back by a transport.
#[derive(Debug, Clone)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

/// Connection-level failure classes a transport can report.
#[derive(Debug, Clone)]
pub enum TransportFailure {
    Timeout,
    Connect(String),
}

/// Minimal POST-JSON transport, factored out so retry, error
/// classification, and payload handling are testable without a network.
pub trait HttpTransport: Send + Sync {
    fn post_json(
        &self,
        url: &str,
        api_key: Option<&str>,
        body: &serde_json::Value,
    ) -> Result<HttpResponse, TransportFailure>;
}

/// Blocking transport backed by ureq.
pub struct UreqTransport {
    agent: ureq::Agent,
}

impl UreqTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build();
        UreqTransport {
            agent: config.new_agent(),
        }
    }
}

impl HttpTransport for UreqTransport {
    fn post_json(
        &self,
        url: &str,
        api_key: Option<&str>,
        body: &serde_json::Value,
    ) -> Result<HttpResponse, TransportFailure> {
        let mut request = self.agent.post(url);
        if let Some(key) = api_key {
            request = request.header("authorization", &format!("Bearer {key}"));
        }
        match request.send_json(body) {
            Ok(mut response) => {
                let status = response.status().as_u16();
                let body = response
                    .body_mut()
                    .read_to_string()
                    .map_err(|e| TransportFailure::Connect(e.to_string()))?;
                Ok(HttpResponse { status, body })
            }
            Err(ureq::Error::Timeout(_)) => Err(TransportFailure::Timeout),
            Err(other) => Err(TransportFailure::Connect(other.to_string())),
        }
    }
}

/// Retry schedule: `attempts` tries total, sleeping `base * 2^(n-1)`
/// between them (1s, 2s, 4s by default).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub attempts: u32,
    #[serde(with = "duration_millis")]
    pub base_backoff: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            attempts: 3,
            base_backoff: Duration::from_secs(1),
        }
    }
}

mod duration_millis {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let millis = u64::deserialize(d)?;
        Ok(Duration::from_millis(millis))
    }
}

impl RetryPolicy {
    fn backoff_for(&self, attempt: u32) -> Duration {
        self.base_backoff * 2u32.saturating_pow(attempt.saturating_sub(1))
    }
}

/// Endpoint settings shared by the chat and embedding providers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the API key. The key is
    /// never accepted as a flag or stored in config files.
    #[serde(default = "default_api_key_env")]
    pub api_key_env: String,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    #[serde(default)]
    pub retry: RetryPolicy,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
}

fn default_api_key_env() -> String {
    "EVGRAPH_API_KEY".to_string()
}

fn default_timeout_secs() -> u64 {
    120
}

fn default_concurrency() -> usize {
    4
}

impl ProviderConfig {
    pub fn api_key(&self) -> Option<String> {
        std::env::var(&self.api_key_env).ok().filter(|k| !k.is_empty())
    }
}

struct RetryOutcome {
    response: HttpResponse,
    retries: u64,
}

/// Runs one logical request through the retry schedule. Retries connect
/// errors, timeouts, and 429/5xx statuses; everything else returns
/// immediately.
fn send_with_retries(
    transport: &dyn HttpTransport,
    url: &str,
    api_key: Option<&str>,
    body: &serde_json::Value,
    retry: &RetryPolicy,
) -> Result<RetryOutcome, GatewayError> {
    let attempts = retry.attempts.max(1);
    let mut retries = 0u64;
    let mut last_failure: Option<TransportFailure> = None;

    for attempt in 1..=attempts {
        if attempt > 1 {
            std::thread::sleep(retry.backoff_for(attempt - 1));
            retries += 1;
        }
        match transport.post_json(url, api_key, body) {
            Ok(response) if response.status == 429 || response.status >= 500 => {
                warn!("provider returned http {} (attempt {attempt}/{attempts})", response.status);
                if attempt == attempts {
                    return Err(GatewayError::Provider {
                        status: Some(response.status),
                        message: truncate(&response.body, 400),
                    });
                }
            }
            Ok(response) => return Ok(RetryOutcome { response, retries }),
            Err(failure) => {
                warn!("transport failure (attempt {attempt}/{attempts})");
                last_failure = Some(failure);
            }
        }
    }

    match last_failure {
        Some(TransportFailure::Timeout) => Err(GatewayError::Timeout { attempts }),
        Some(TransportFailure::Connect(detail)) => Err(GatewayError::Transport {
            attempts,
            detail,
        }),
        None => unreachable!("retry loop always records a failure before falling through"),
    }
}

fn truncate(text: &str, limit: usize) -> String {
    if text.len() <= limit {
        text.to_string()
    } else {
        let mut end = limit;
        while !text.is_char_boundary(end) {
            end -= 1;
        }
        format!("{}...", &text[..end])
    }
}

/// Chat-completion-style generation provider.
///
/// Sends `{model, messages, temperature, top_p, max_tokens}` and reads
/// `choices[0].message.content`. A semaphore bounds in-flight requests.
pub struct HttpChatProvider {
    transport: Arc<dyn HttpTransport>,
    endpoint: String,
    model: String,
    api_key: Option<String>,
    retry: RetryPolicy,
    semaphore: Semaphore,
    completions: AtomicU64,
    retries: AtomicU64,
    chars_out: AtomicU64,
}

impl HttpChatProvider {
    pub fn from_config(config: &ProviderConfig) -> Self {
        let transport = Arc::new(UreqTransport::new(Duration::from_secs(config.timeout_secs)));
        HttpChatProvider::with_transport(transport, config)
    }

    pub fn with_transport(transport: Arc<dyn HttpTransport>, config: &ProviderConfig) -> Self {
        HttpChatProvider {
            transport,
            endpoint: config.endpoint.clone(),
            model: config.model.clone(),
            api_key: config.api_key(),
            retry: config.retry,
            semaphore: Semaphore::new(config.concurrency),
            completions: AtomicU64::new(0),
            retries: AtomicU64::new(0),
            chars_out: AtomicU64::new(0),
        }
    }

    pub fn completions_served(&self) -> u64 {
        self.completions.load(Ordering::Relaxed)
    }

    pub fn retries_performed(&self) -> u64 {
        self.retries.load(Ordering::Relaxed)
    }

    /// Total characters of response text, the only token-ish accounting
    /// the gateway does.
    pub fn chars_received(&self) -> u64 {
        self.chars_out.load(Ordering::Relaxed)
    }
}

impl TextGenerator for HttpChatProvider {
    fn complete(&self, request: &GenerationRequest) -> Result<String, GatewayError> {
        let _permit = self.semaphore.acquire();
        let body = json!({
            "model": self.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "top_p": request.top_p,
            "max_tokens": request.max_tokens,
        });
        let outcome = send_with_retries(
            self.transport.as_ref(),
            &self.endpoint,
            self.api_key.as_deref(),
            &body,
            &self.retry,
        )?;
        self.retries.fetch_add(outcome.retries, Ordering::Relaxed);
        let response = outcome.response;

        if response.status >= 400 {
            return Err(GatewayError::Provider {
                status: Some(response.status),
                message: provider_error_message(&response.body),
            });
        }
        let parsed: ChatResponse = serde_json::from_str(&response.body)
            .map_err(|e| GatewayError::Payload(format!("chat response: {e}")))?;
        let content = parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| GatewayError::Payload("chat response has no choices".to_string()))?;
        self.completions.fetch_add(1, Ordering::Relaxed);
        self.chars_out.fetch_add(content.len() as u64, Ordering::Relaxed);
        Ok(content)
    }
}

/// Embedding provider; batches transparently and checks that every vector
/// shares one dimension.
pub struct HttpEmbeddingProvider {
    transport: Arc<dyn HttpTransport>,
    endpoint: String,
    model: String,
    api_key: Option<String>,
    retry: RetryPolicy,
    semaphore: Semaphore,
    batch_size: usize,
}

impl HttpEmbeddingProvider {
    pub fn from_config(config: &ProviderConfig, batch_size: usize) -> Self {
        let transport = Arc::new(UreqTransport::new(Duration::from_secs(config.timeout_secs)));
        HttpEmbeddingProvider::with_transport(transport, config, batch_size)
    }

    pub fn with_transport(
        transport: Arc<dyn HttpTransport>,
        config: &ProviderConfig,
        batch_size: usize,
    ) -> Self {
        HttpEmbeddingProvider {
            transport,
            endpoint: config.endpoint.clone(),
            model: config.model.clone(),
            api_key: config.api_key(),
            retry: config.retry,
            semaphore: Semaphore::new(config.concurrency),
            batch_size: batch_size.max(1),
        }
    }

    fn embed_batch(&self, batch: &[String]) -> Result<Vec<EmbeddingVector>, GatewayError> {
        let _permit = self.semaphore.acquire();
        let body = json!({ "model": self.model, "input": batch });
        let outcome = send_with_retries(
            self.transport.as_ref(),
            &self.endpoint,
            self.api_key.as_deref(),
            &body,
            &self.retry,
        )?;
        let response = outcome.response;
        if response.status >= 400 {
            return Err(GatewayError::Provider {
                status: Some(response.status),
                message: provider_error_message(&response.body),
            });
        }
        let parsed: EmbeddingResponse = serde_json::from_str(&response.body)
            .map_err(|e| GatewayError::Payload(format!("embedding response: {e}")))?;
        if parsed.data.len() != batch.len() {
            return Err(GatewayError::Payload(format!(
                "embedding response has {} vectors for {} inputs",
                parsed.data.len(),
                batch.len()
            )));
        }
        let mut rows = parsed.data;
        rows.sort_by_key(|r| r.index);
        Ok(rows
            .into_iter()
            .map(|r| EmbeddingVector::new(r.embedding))
            .collect())
    }
}

impl TextEmbedder for HttpEmbeddingProvider {
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, GatewayError> {
        if texts.is_empty() || texts.iter().any(|t| t.trim().is_empty()) {
            return Err(GatewayError::EmptyEmbedInput);
        }
        let mut vectors = Vec::with_capacity(texts.len());
        for batch in texts.chunks(self.batch_size) {
            vectors.extend(self.embed_batch(batch)?);
        }
        let dimension = vectors[0].dimension();
        for vector in &vectors {
            if vector.dimension() != dimension {
                return Err(GatewayError::DimensionMismatch {
                    expected: dimension,
                    got: vector.dimension(),
                });
            }
        }
        Ok(vectors)
    }
}

fn provider_error_message(body: &str) -> String {
    #[derive(Deserialize)]
    struct ErrorEnvelope {
        error: ErrorBody,
    }
    #[derive(Deserialize)]
    struct ErrorBody {
        message: String,
    }
    serde_json::from_str::<ErrorEnvelope>(body)
        .map(|e| e.error.message)
        .unwrap_or_else(|_| truncate(body, 400))
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: String,
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingRow>,
}

#[derive(Deserialize)]
struct EmbeddingRow {
    index: usize,
    embedding: Vec<f64>,
}
