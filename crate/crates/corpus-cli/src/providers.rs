use std::time::Duration;

use anyhow::{bail, Context};
use llm_gateway::{
    CachedGenerator, HttpChatProvider, HttpEmbeddingProvider, ProviderConfig, RetryPolicy,
    ScriptedProvider, SyntheticEmbedder, TextEmbedder, TextGenerator,
};

use crate::config::RunConfig;

fn provider_config(config: &RunConfig) -> ProviderConfig {
    ProviderConfig {
        endpoint: config.provider.endpoint.clone(),
        model: config.provider.model.clone(),
        api_key_env: config.provider.api_key_env.clone(),
        timeout_secs: config.provider.timeout_secs,
        retry: RetryPolicy {
            attempts: config.provider.max_retries,
            base_backoff: Duration::from_millis(config.provider.backoff_ms),
        },
        concurrency: config.provider.concurrency,
    }
}

/// Builds the configured generation backend, wrapped in the filesystem
/// response cache when a cache directory is set.
pub fn build_generator(config: &RunConfig) -> anyhow::Result<Box<dyn TextGenerator>> {
    let inner: Box<dyn TextGenerator> = match config.provider.kind.as_str() {
        "scripted" => {
            let path = config
                .provider
                .scripted_fixtures
                .as_ref()
                .context("scripted provider needs provider.scripted_fixtures")?;
            Box::new(
                ScriptedProvider::from_fixture_file(path)
                    .with_context(|| format!("loading fixtures {}", path.display()))?,
            )
        }
        "http" => Box::new(HttpChatProvider::from_config(&provider_config(config))),
        other => bail!("unknown provider kind \"{other}\""),
    };
    match &config.paths.cache_dir {
        Some(dir) => Ok(Box::new(CachedGenerator::new(inner, dir)?)),
        None => Ok(inner),
    }
}

/// Builds the configured embedding backend.
pub fn build_embedder(config: &RunConfig) -> anyhow::Result<Box<dyn TextEmbedder>> {
    match config.embedding.kind.as_str() {
        "synthetic" => Ok(Box::new(SyntheticEmbedder::new())),
        "http" => {
            let provider = ProviderConfig {
                endpoint: config.embedding.endpoint.clone(),
                model: config.embedding.model.clone(),
                ..provider_config(config)
            };
            Ok(Box::new(HttpEmbeddingProvider::from_config(
                &provider,
                config.embedding.batch_size,
            )))
        }
        other => bail!("unknown embedding kind \"{other}\""),
    }
}
