use std::collections::BTreeMap;

use cascade_pipeline::PipelineTrace;
use event_graph_core::RelationType;
use prompt_codegen::ParseStatus;
use serde::{Deserialize, Serialize};

/// Per-relation counts of affected documents.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RelationBreakdown {
    pub format_error_documents: usize,
    pub cycle_documents: usize,
}

/// Corpus-level format-error and cycle statistics.
///
/// A document counts as a format error when any relation round's response
/// had no parseable edge call and no graph declaration; it counts as a
/// cycle when any round's raw parsed edge set (before DAG enforcement)
/// contains a directed cycle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormatStats {
    pub documents_total: usize,
    pub format_error_documents: usize,
    pub cycle_documents: usize,
    pub format_error_pct: f64,
    pub cycle_pct: f64,
    pub per_relation: BTreeMap<String, RelationBreakdown>,
}

pub fn compute_format_stats(traces: &[PipelineTrace]) -> FormatStats {
    let total = traces.len();
    let mut format_error_documents = 0;
    let mut cycle_documents = 0;
    let mut per_relation: BTreeMap<String, RelationBreakdown> = RelationType::ALL
        .iter()
        .map(|r| (r.as_str().to_string(), RelationBreakdown::default()))
        .collect();

    for trace in traces {
        let mut doc_format_error = false;
        let mut doc_cycle = false;
        for relation_trace in &trace.relations {
            let key = relation_trace.relation.as_str().to_string();
            let entry = per_relation.entry(key).or_default();
            let rel_format_error = relation_trace
                .rounds
                .iter()
                .any(|round| round.parse_status == ParseStatus::FormatError);
            let rel_cycle = relation_trace
                .rounds
                .iter()
                .any(|round| round.raw_edges_contain_cycle());
            if rel_format_error {
                entry.format_error_documents += 1;
                doc_format_error = true;
            }
            if rel_cycle {
                entry.cycle_documents += 1;
                doc_cycle = true;
            }
        }
        if doc_format_error {
            format_error_documents += 1;
        }
        if doc_cycle {
            cycle_documents += 1;
        }
    }

    let pct = |count: usize| {
        if total == 0 {
            0.0
        } else {
            count as f64 / total as f64 * 100.0
        }
    };
    FormatStats {
        documents_total: total,
        format_error_documents,
        cycle_documents,
        format_error_pct: pct(format_error_documents),
        cycle_pct: pct(cycle_documents),
        per_relation,
    }
}
