use event_graph_core::RelationType;
use llm_gateway::StageParams;
use serde::{Deserialize, Serialize};

/// Pipeline knobs. The relation generation order is fixed (hierarchical,
/// temporal, causal); `relations` may select a subset but is always
/// applied in that order.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Refinement rounds per relation graph.
    pub max_rounds: usize,
    /// Stop a relation's refinement once a round retains no new edge.
    pub early_stop_on_no_new_edges: bool,
    pub stage_params: StageParams,
    /// Word-count bounds for the pre-pipeline length filter.
    pub min_words: usize,
    pub max_words: usize,
    /// Relations to generate; the canonical order is enforced.
    pub relations: Vec<RelationType>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            max_rounds: 5,
            early_stop_on_no_new_edges: true,
            stage_params: StageParams::default(),
            min_words: 100,
            max_words: 8500,
            relations: RelationType::ALL.to_vec(),
        }
    }
}

impl PipelineConfig {
    /// Selected relations in canonical generation order.
    pub fn ordered_relations(&self) -> Vec<RelationType> {
        RelationType::ALL
            .iter()
            .copied()
            .filter(|r| self.relations.contains(r))
            .collect()
    }

    /// Length filter bounds disabled; used by fixture-scale tests where
    /// documents are a sentence long.
    pub fn without_length_filter(mut self) -> Self {
        self.min_words = 0;
        self.max_words = usize::MAX;
        self
    }
}
