use std::path::PathBuf;

use anyhow::{bail, Context};
use cascade_pipeline::PipelineConfig;
use serde::{Deserialize, Serialize};

/// Provider backend selection and endpoint settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderSettings {
    /// "http" for a live chat-completion endpoint, "scripted" for a
    /// fixture file.
    pub kind: String,
    pub endpoint: String,
    pub model: String,
    /// Environment variable the API key is read from. The key itself is
    /// never part of configuration files or flags.
    pub api_key_env: String,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub backoff_ms: u64,
    pub concurrency: usize,
    pub scripted_fixtures: Option<PathBuf>,
}

impl Default for ProviderSettings {
    fn default() -> Self {
        ProviderSettings {
            kind: "http".to_string(),
            endpoint: "http://localhost:8000/v1/chat/completions".to_string(),
            model: "llama3-70b-instruct".to_string(),
            api_key_env: "EVGRAPH_API_KEY".to_string(),
            timeout_secs: 120,
            max_retries: 3,
            backoff_ms: 1000,
            concurrency: 4,
            scripted_fixtures: None,
        }
    }
}

/// Embedding backend selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingSettings {
    /// "synthetic" for the hashed bag-of-words embedder, "http" for an
    /// embedding endpoint.
    pub kind: String,
    pub endpoint: String,
    pub model: String,
    pub batch_size: usize,
}

impl Default for EmbeddingSettings {
    fn default() -> Self {
        EmbeddingSettings {
            kind: "synthetic".to_string(),
            endpoint: "http://localhost:8000/v1/embeddings".to_string(),
            model: "sfr-embedding-mistral".to_string(),
            batch_size: 64,
        }
    }
}

/// Default input/output locations, overridable per command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PathSettings {
    pub corpus: Option<PathBuf>,
    pub bundles_dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
    pub manifest: PathBuf,
    pub trace: Option<PathBuf>,
    pub templates_dir: Option<PathBuf>,
}

impl Default for PathSettings {
    fn default() -> Self {
        PathSettings {
            corpus: None,
            bundles_dir: PathBuf::from("out/bundles"),
            cache_dir: Some(PathBuf::from("out/cache")),
            manifest: PathBuf::from("out/manifest.jsonl"),
            trace: None,
            templates_dir: None,
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub provider: ProviderSettings,
    pub embedding: EmbeddingSettings,
    pub pipeline: PipelineConfig,
    pub paths: PathSettings,
    pub parallelism: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            provider: ProviderSettings::default(),
            embedding: EmbeddingSettings::default(),
            pipeline: PipelineConfig::default(),
            paths: PathSettings::default(),
            parallelism: 2,
        }
    }
}

/// Flag-level overrides, applied last.
#[derive(Debug, Clone, Default)]
pub struct CliOverrides {
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub parallelism: Option<usize>,
    pub max_rounds: Option<usize>,
    pub templates_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Resolves configuration with precedence flags > environment >
    /// config file > defaults. The environment is injected as a lookup
    /// function so the precedence matrix is testable without touching
    /// process state.
    pub fn resolve(
        file_toml: Option<&str>,
        env: &dyn Fn(&str) -> Option<String>,
        flags: &CliOverrides,
    ) -> anyhow::Result<RunConfig> {
        let mut config: RunConfig = match file_toml {
            Some(text) => toml::from_str(text).context("parsing config file")?,
            None => RunConfig::default(),
        };

        if let Some(endpoint) = env("EVGRAPH_ENDPOINT") {
            config.provider.endpoint = endpoint;
        }
        if let Some(model) = env("EVGRAPH_MODEL") {
            config.provider.model = model;
        }
        if let Some(parallelism) = env("EVGRAPH_PARALLELISM") {
            config.parallelism = parallelism
                .parse()
                .context("EVGRAPH_PARALLELISM must be an integer")?;
        }
        if let Some(rounds) = env("EVGRAPH_MAX_ROUNDS") {
            config.pipeline.max_rounds = rounds
                .parse()
                .context("EVGRAPH_MAX_ROUNDS must be an integer")?;
        }
        if let Some(dir) = env("EVGRAPH_TEMPLATES_DIR") {
            config.paths.templates_dir = Some(PathBuf::from(dir));
        }
        if let Some(dir) = env("EVGRAPH_CACHE_DIR") {
            config.paths.cache_dir = Some(PathBuf::from(dir));
        }

        if let Some(endpoint) = &flags.endpoint {
            config.provider.endpoint = endpoint.clone();
        }
        if let Some(model) = &flags.model {
            config.provider.model = model.clone();
        }
        if let Some(parallelism) = flags.parallelism {
            config.parallelism = parallelism;
        }
        if let Some(rounds) = flags.max_rounds {
            config.pipeline.max_rounds = rounds;
        }
        if let Some(dir) = &flags.templates_dir {
            config.paths.templates_dir = Some(dir.clone());
        }
        if let Some(dir) = &flags.cache_dir {
            config.paths.cache_dir = Some(dir.clone());
        }

        config.validate()?;
        Ok(config)
    }

    /// Loads and resolves from an optional config file path plus process
    /// environment.
    pub fn load(
        config_path: Option<&PathBuf>,
        flags: &CliOverrides,
    ) -> anyhow::Result<RunConfig> {
        let file_text = match config_path {
            Some(path) => Some(
                std::fs::read_to_string(path)
                    .with_context(|| format!("reading config file {}", path.display()))?,
            ),
            None => None,
        };
        RunConfig::resolve(file_text.as_deref(), &|key| std::env::var(key).ok(), flags)
    }

    fn validate(&self) -> anyhow::Result<()> {
        if self.parallelism == 0 {
            bail!("parallelism must be at least 1");
        }
        if self.pipeline.max_rounds == 0 {
            bail!("max_rounds must be at least 1");
        }
        if self.pipeline.min_words >= self.pipeline.max_words {
            bail!(
                "length filter bounds invalid: min {} must be below max {}",
                self.pipeline.min_words,
                self.pipeline.max_words
            );
        }
        match self.provider.kind.as_str() {
            "http" | "scripted" => {}
            other => bail!("unknown provider kind \"{other}\" (expected http or scripted)"),
        }
        match self.embedding.kind.as_str() {
            "synthetic" | "http" => {}
            other => bail!("unknown embedding kind \"{other}\" (expected synthetic or http)"),
        }
        Ok(())
    }
}
