use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GatewayError;

/// Pipeline stage a request belongs to; selects sampling parameters and
/// keys scripted fixtures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageTag {
    Summary,
    Events,
    Graph,
    Grader,
    Mention,
}

impl StageTag {
    pub const ALL: [StageTag; 5] = [
        StageTag::Summary,
        StageTag::Events,
        StageTag::Graph,
        StageTag::Grader,
        StageTag::Mention,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StageTag::Summary => "summary",
            StageTag::Events => "events",
            StageTag::Graph => "graph",
            StageTag::Grader => "grader",
            StageTag::Mention => "mention",
        }
    }
}

impl fmt::Display for StageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sampling settings for one stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingParams {
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
}

impl SamplingParams {
    pub fn new(temperature: f64, top_p: f64, max_tokens: u32) -> Self {
        SamplingParams {
            temperature,
            top_p,
            max_tokens,
        }
    }
}

/// Per-stage sampling parameters.
///
/// Defaults: summary (0.8, 0.9), events (0.5, 0.9), graph (0.5, 0.9),
/// grader (0.0, 0.9), mention (0.0, 0.9); 4096 max tokens for the graph
/// stage and 1024 elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StageParams {
    pub summary: SamplingParams,
    pub events: SamplingParams,
    pub graph: SamplingParams,
    pub grader: SamplingParams,
    pub mention: SamplingParams,
}

impl Default for StageParams {
    fn default() -> Self {
        StageParams {
            summary: SamplingParams::new(0.8, 0.9, 1024),
            events: SamplingParams::new(0.5, 0.9, 1024),
            graph: SamplingParams::new(0.5, 0.9, 4096),
            grader: SamplingParams::new(0.0, 0.9, 1024),
            mention: SamplingParams::new(0.0, 0.9, 1024),
        }
    }
}

impl StageParams {
    pub fn for_stage(&self, stage: StageTag) -> SamplingParams {
        match stage {
            StageTag::Summary => self.summary,
            StageTag::Events => self.events,
            StageTag::Graph => self.graph,
            StageTag::Grader => self.grader,
            StageTag::Mention => self.mention,
        }
    }
}

/// One text-generation request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub prompt: String,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
    pub stage_tag: StageTag,
}

impl GenerationRequest {
    /// Validates bounds: temperature in [0, 2], top_p in (0, 1],
    /// max_tokens >= 1.
    pub fn new(
        stage_tag: StageTag,
        prompt: impl Into<String>,
        params: SamplingParams,
    ) -> Result<Self, GatewayError> {
        if !(0.0..=2.0).contains(&params.temperature) || !params.temperature.is_finite() {
            return Err(GatewayError::InvalidRequest(format!(
                "temperature {} outside [0, 2]",
                params.temperature
            )));
        }
        if !(params.top_p > 0.0 && params.top_p <= 1.0) {
            return Err(GatewayError::InvalidRequest(format!(
                "top_p {} outside (0, 1]",
                params.top_p
            )));
        }
        if params.max_tokens == 0 {
            return Err(GatewayError::InvalidRequest(
                "max_tokens must be positive".to_string(),
            ));
        }
        Ok(GenerationRequest {
            prompt: prompt.into(),
            temperature: params.temperature,
            top_p: params.top_p,
            max_tokens: params.max_tokens,
            stage_tag,
        })
    }

    /// Builds a request using the stage's configured sampling parameters.
    pub fn for_stage(
        stage: StageTag,
        prompt: impl Into<String>,
        params: &StageParams,
    ) -> Result<Self, GatewayError> {
        GenerationRequest::new(stage, prompt, params.for_stage(stage))
    }
}

/// A fixed-length real vector produced by an embedding backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    values: Vec<f64>,
}

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Self {
        EmbeddingVector { values }
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Cosine similarity; rejects zero-norm vectors and dimension
    /// mismatches.
    pub fn cosine_similarity(&self, other: &EmbeddingVector) -> Result<f64, GatewayError> {
        if self.dimension() != other.dimension() {
            return Err(GatewayError::DimensionMismatch {
                expected: self.dimension(),
                got: other.dimension(),
            });
        }
        let norm_a = self.l2_norm();
        let norm_b = other.l2_norm();
        if norm_a == 0.0 || norm_b == 0.0 {
            return Err(GatewayError::ZeroNorm);
        }
        let dot: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum();
        Ok(dot / (norm_a * norm_b))
    }

    /// Cosine distance, `1 - cosine_similarity` (raw range [0, 2]).
    pub fn cosine_distance(&self, other: &EmbeddingVector) -> Result<f64, GatewayError> {
        Ok(1.0 - self.cosine_similarity(other)?)
    }
}
