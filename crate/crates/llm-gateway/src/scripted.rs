use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::GatewayError;
use crate::request::{GenerationRequest, StageTag};
use crate::TextGenerator;

/// Hex SHA-256 of a prompt; the fixture key together with the stage tag.
pub fn prompt_digest(prompt: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(prompt.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// One entry of a fixture file. Either the full prompt or its digest must
/// be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub stage: StageTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_sha256: Option<String>,
    pub response: String,
}

/// Fully deterministic generation backend for tests and replays.
///
/// Responses are fixtures keyed by `(stage_tag, sha256(prompt))`. An
/// unknown key is a hard, deterministic error rather than a fallback, so
/// a drifting prompt renderer fails loudly instead of silently returning
/// the wrong transcript.
#[derive(Debug, Default)]
pub struct ScriptedProvider {
    fixtures: HashMap<(StageTag, String), String>,
    calls: AtomicU64,
}

impl ScriptedProvider {
    pub fn new() -> Self {
        ScriptedProvider::default()
    }

    /// Registers a response for the exact prompt text.
    pub fn insert(&mut self, stage: StageTag, prompt: &str, response: impl Into<String>) {
        self.fixtures
            .insert((stage, prompt_digest(prompt)), response.into());
    }

    /// Registers a response for a precomputed prompt digest.
    pub fn insert_digest(
        &mut self,
        stage: StageTag,
        digest: impl Into<String>,
        response: impl Into<String>,
    ) {
        self.fixtures.insert((stage, digest.into()), response.into());
    }

    pub fn from_entries(entries: impl IntoIterator<Item = FixtureEntry>) -> Result<Self, GatewayError> {
        let mut provider = ScriptedProvider::new();
        for entry in entries {
            let digest = match (&entry.prompt, &entry.prompt_sha256) {
                (Some(prompt), _) => prompt_digest(prompt),
                (None, Some(digest)) => digest.clone(),
                (None, None) => {
                    return Err(GatewayError::Payload(
                        "fixture entry needs prompt or prompt_sha256".to_string(),
                    ))
                }
            };
            provider.fixtures.insert((entry.stage, digest), entry.response);
        }
        Ok(provider)
    }

    /// Loads a JSON fixture file: a list of [`FixtureEntry`] objects.
    pub fn from_fixture_file(path: &Path) -> Result<Self, GatewayError> {
        let text = std::fs::read_to_string(path)?;
        let entries: Vec<FixtureEntry> =
            serde_json::from_str(&text).map_err(|e| GatewayError::Payload(e.to_string()))?;
        ScriptedProvider::from_entries(entries)
    }

    pub fn fixture_count(&self) -> usize {
        self.fixtures.len()
    }

    /// Exports the fixtures (digest-keyed) for writing to a fixture file,
    /// sorted for stable output.
    pub fn to_entries(&self) -> Vec<FixtureEntry> {
        let mut entries: Vec<FixtureEntry> = self
            .fixtures
            .iter()
            .map(|((stage, digest), response)| FixtureEntry {
                stage: *stage,
                prompt: None,
                prompt_sha256: Some(digest.clone()),
                response: response.clone(),
            })
            .collect();
        entries.sort_by(|a, b| {
            (a.stage.as_str(), &a.prompt_sha256).cmp(&(b.stage.as_str(), &b.prompt_sha256))
        });
        entries
    }

    /// Number of completions served so far.
    pub fn call_count(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

impl TextGenerator for ScriptedProvider {
    fn complete(&self, request: &GenerationRequest) -> Result<String, GatewayError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let digest = prompt_digest(&request.prompt);
        self.fixtures
            .get(&(request.stage_tag, digest.clone()))
            .cloned()
            .ok_or(GatewayError::FixtureMissing {
                stage: request.stage_tag,
                digest,
            })
    }
}
