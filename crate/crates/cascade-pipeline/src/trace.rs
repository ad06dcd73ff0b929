use event_graph_core::{detect_cycle_in_pairs, RelationType};
use prompt_codegen::{ParseStatus, Verdict};
use serde::{Deserialize, Serialize};

/// One graded edge within a round. `cached` marks verdicts reused from an
/// earlier round of the same document + relation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradeRecord {
    pub head: String,
    pub tail: String,
    pub verdict: Verdict,
    pub cached: bool,
    /// True when the verdict came from an unparseable grader response and
    /// was conservatively treated as no.
    pub parse_failed: bool,
}

/// Everything observed in one refinement round.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundTrace {
    pub round: usize,
    pub parse_status: ParseStatus,
    pub had_code_block: bool,
    /// Endpoint-valid edges exactly as parsed, before any grading or DAG
    /// enforcement (the "raw" edge set for cycle statistics).
    pub parsed_edges: Vec<(String, String)>,
    /// Pairs with an endpoint outside the event list.
    pub dropped_endpoints: Vec<(String, String)>,
    pub graded: Vec<GradeRecord>,
    /// Edges added to the graph this round.
    pub retained: Vec<(String, String)>,
    /// Yes-graded edges rejected because insertion would create a cycle
    /// (self-pairs included).
    pub rejected_cycle: Vec<(String, String)>,
    /// Re-proposals of edges already in the graph.
    pub duplicates: Vec<(String, String)>,
}

impl RoundTrace {
    /// Whether the raw parsed edge set of this round contains a directed
    /// cycle (self-pairs count).
    pub fn raw_edges_contain_cycle(&self) -> bool {
        if self.parsed_edges.iter().any(|(h, t)| h == t) {
            return true;
        }
        detect_cycle_in_pairs(&self.parsed_edges).is_some()
    }
}

/// All rounds for one relation type of one document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationTrace {
    pub relation: RelationType,
    pub rounds: Vec<RoundTrace>,
    pub final_edges: Vec<(String, String)>,
    pub stopped_early: bool,
}

impl RelationTrace {
    pub fn rounds_used(&self) -> usize {
        self.rounds.len()
    }
}

/// Full per-document log of a pipeline run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub document_id: String,
    pub summary: String,
    pub events: Vec<String>,
    pub relations: Vec<RelationTrace>,
}

impl PipelineTrace {
    pub fn relation(&self, relation: RelationType) -> Option<&RelationTrace> {
        self.relations.iter().find(|t| t.relation == relation)
    }

    pub fn had_format_error(&self) -> bool {
        self.relations.iter().any(|rel| {
            rel.rounds
                .iter()
                .any(|round| round.parse_status == ParseStatus::FormatError)
        })
    }

    pub fn had_raw_cycle(&self) -> bool {
        self.relations
            .iter()
            .any(|rel| rel.rounds.iter().any(|round| round.raw_edges_contain_cycle()))
    }
}
