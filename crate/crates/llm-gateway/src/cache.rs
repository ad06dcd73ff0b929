use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::GatewayError;
use crate::request::GenerationRequest;
use crate::TextGenerator;

#[derive(Debug, Serialize, Deserialize)]
struct CacheEntry {
    stage: String,
    response: String,
}

/// Filesystem response cache wrapping any generator.
///
/// One file per request hash (stage, sampling parameters, and prompt all
/// feed the key), written atomically via a temp file and rename, so a
/// corpus run interrupted mid-flight resumes without repeating completed
/// requests.
pub struct CachedGenerator<G> {
    inner: G,
    dir: PathBuf,
    hits: AtomicU64,
    misses: AtomicU64,
    write_seq: AtomicU64,
}

impl<G: TextGenerator> CachedGenerator<G> {
    pub fn new(inner: G, dir: impl Into<PathBuf>) -> Result<Self, GatewayError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(CachedGenerator {
            inner,
            dir,
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            write_seq: AtomicU64::new(0),
        })
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    /// Cache key: SHA-256 over every request field that affects the
    /// response.
    pub fn request_key(request: &GenerationRequest) -> String {
        let mut hasher = Sha256::new();
        hasher.update(request.stage_tag.as_str().as_bytes());
        hasher.update(b"\n");
        hasher.update(format!("{:.6}\n{:.6}\n{}\n", request.temperature, request.top_p, request.max_tokens));
        hasher.update(request.prompt.as_bytes());
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    fn entry_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    fn read_entry(path: &Path) -> Option<String> {
        let text = std::fs::read_to_string(path).ok()?;
        serde_json::from_str::<CacheEntry>(&text)
            .ok()
            .map(|entry| entry.response)
    }

    fn write_entry(&self, key: &str, request: &GenerationRequest, response: &str) -> Result<(), GatewayError> {
        let entry = CacheEntry {
            stage: request.stage_tag.as_str().to_string(),
            response: response.to_string(),
        };
        let text = serde_json::to_string(&entry)
            .map_err(|e| GatewayError::Payload(format!("cache entry: {e}")))?;
        // Unique temp name per write so concurrent misses on one key
        // never interleave; the last rename wins atomically.
        let seq = self.write_seq.fetch_add(1, Ordering::Relaxed);
        let tmp = self
            .dir
            .join(format!(".{key}.tmp.{}.{seq}", std::process::id()));
        std::fs::write(&tmp, text)?;
        std::fs::rename(&tmp, self.entry_path(key))?;
        Ok(())
    }
}

impl<G: TextGenerator> TextGenerator for CachedGenerator<G> {
    fn complete(&self, request: &GenerationRequest) -> Result<String, GatewayError> {
        let key = Self::request_key(request);
        if let Some(response) = Self::read_entry(&self.entry_path(&key)) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(response);
        }
        let response = self.inner.complete(request)?;
        self.write_entry(&key, request, &response)?;
        self.misses.fetch_add(1, Ordering::Relaxed);
        Ok(response)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::request::{StageParams, StageTag};
    use crate::scripted::ScriptedProvider;

    fn request(prompt: &str) -> GenerationRequest {
        GenerationRequest::for_stage(StageTag::Graph, prompt, &StageParams::default()).unwrap()
    }

    #[test]
    fn misses_then_hits() {
        let dir = tempfile::tempdir().unwrap();
        let mut scripted = ScriptedProvider::new();
        scripted.insert(StageTag::Graph, "p", "completed graph");
        let cached = CachedGenerator::new(scripted, dir.path()).unwrap();

        assert_eq!(cached.complete(&request("p")).unwrap(), "completed graph");
        assert_eq!(cached.complete(&request("p")).unwrap(), "completed graph");
        assert_eq!(cached.misses(), 1);
        assert_eq!(cached.hits(), 1);
    }

    #[test]
    fn cache_survives_provider_replacement() {
        let dir = tempfile::tempdir().unwrap();
        {
            let mut scripted = ScriptedProvider::new();
            scripted.insert(StageTag::Graph, "p", "first run answer");
            let cached = CachedGenerator::new(scripted, dir.path()).unwrap();
            cached.complete(&request("p")).unwrap();
        }
        // Second run: provider no longer knows the fixture, cache answers.
        let empty = ScriptedProvider::new();
        let cached = CachedGenerator::new(empty, dir.path()).unwrap();
        assert_eq!(cached.complete(&request("p")).unwrap(), "first run answer");
        assert_eq!(cached.hits(), 1);
    }

    #[test]
    fn different_sampling_params_use_different_keys() {
        let base = request("p");
        let mut hotter = base.clone();
        hotter.temperature = 1.5;
        assert_ne!(
            CachedGenerator::<ScriptedProvider>::request_key(&base),
            CachedGenerator::<ScriptedProvider>::request_key(&hotter)
        );
    }

    #[test]
    fn provider_errors_are_not_cached() {
        let dir = tempfile::tempdir().unwrap();
        let cached = CachedGenerator::new(ScriptedProvider::new(), dir.path()).unwrap();
        assert!(cached.complete(&request("missing")).is_err());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}
