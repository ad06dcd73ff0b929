use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::event::{Event, RelationEdge, RelationType};
use crate::graph::RelationGraph;

/// The three relation graphs generated for one document. All graphs share
/// one node set.
#[derive(Debug, Clone, PartialEq)]
pub struct EventGraphBundle {
    document_id: String,
    hierarchical: RelationGraph,
    temporal: RelationGraph,
    causal: RelationGraph,
}

/// Serialized form of a bundle. Canonical ordering: events sorted
/// lexicographically, relation triplets sorted by (relation, head, tail).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleJson {
    pub document_id: String,
    pub events: Vec<String>,
    pub relations: Vec<RelationJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationJson {
    pub head: String,
    pub relation: String,
    pub tail: String,
}

impl EventGraphBundle {
    pub fn new(
        document_id: impl Into<String>,
        hierarchical: RelationGraph,
        temporal: RelationGraph,
        causal: RelationGraph,
    ) -> Result<Self, GraphError> {
        for (graph, expected) in [
            (&hierarchical, RelationType::Hierarchical),
            (&temporal, RelationType::Temporal),
            (&causal, RelationType::Causal),
        ] {
            if graph.relation() != expected {
                return Err(GraphError::RelationMismatch {
                    expected: expected.to_string(),
                    found: graph.relation().to_string(),
                });
            }
        }
        let reference: BTreeSet<&Event> = hierarchical.nodes().iter().collect();
        for graph in [&temporal, &causal] {
            let other: BTreeSet<&Event> = graph.nodes().iter().collect();
            if other != reference {
                return Err(GraphError::NodeSetMismatch);
            }
        }
        Ok(EventGraphBundle {
            document_id: document_id.into(),
            hierarchical,
            temporal,
            causal,
        })
    }

    pub fn document_id(&self) -> &str {
        &self.document_id
    }

    pub fn graph(&self, relation: RelationType) -> &RelationGraph {
        match relation {
            RelationType::Hierarchical => &self.hierarchical,
            RelationType::Temporal => &self.temporal,
            RelationType::Causal => &self.causal,
        }
    }

    /// The shared node set, in the hierarchical graph's insertion order.
    pub fn events(&self) -> &[Event] {
        self.hierarchical.nodes()
    }

    pub fn total_edge_count(&self) -> usize {
        RelationType::ALL
            .iter()
            .map(|&r| self.graph(r).edge_count())
            .sum()
    }

    /// Canonical JSON view: events sorted lexicographically, edges sorted
    /// by (relation name, head, tail).
    pub fn to_json(&self) -> BundleJson {
        let mut events: Vec<String> = self
            .events()
            .iter()
            .map(|e| e.text().to_string())
            .collect();
        events.sort();

        let mut relations: Vec<RelationJson> = RelationType::ALL
            .iter()
            .flat_map(|&relation| {
                self.graph(relation).edges().iter().map(move |edge| RelationJson {
                    head: edge.head().text().to_string(),
                    relation: relation.as_str().to_string(),
                    tail: edge.tail().text().to_string(),
                })
            })
            .collect();
        relations.sort_by(|a, b| {
            (&a.relation, &a.head, &a.tail).cmp(&(&b.relation, &b.head, &b.tail))
        });

        BundleJson {
            document_id: self.document_id.clone(),
            events,
            relations,
        }
    }

    /// Byte-stable canonical serialization (pretty JSON, trailing newline).
    pub fn to_canonical_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(&self.to_json()).expect("bundle serializes");
        out.push('\n');
        out
    }

    /// Parses and fully validates a bundle: known relation names, endpoints
    /// within the event list, no duplicate edges, acyclic graphs.
    pub fn from_json(json: &str) -> Result<Self, GraphError> {
        let raw: BundleJson = serde_json::from_str(json)?;
        Self::from_bundle_json(raw)
    }

    pub fn from_bundle_json(raw: BundleJson) -> Result<Self, GraphError> {
        let mut events = Vec::with_capacity(raw.events.len());
        for text in &raw.events {
            events.push(Event::new(text)?);
        }

        let mut per_relation: [Vec<RelationEdge>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for rel_json in &raw.relations {
            let relation: RelationType = rel_json.relation.parse()?;
            let edge = RelationEdge::new(
                Event::new(&rel_json.head)?,
                Event::new(&rel_json.tail)?,
                relation,
            )?;
            let slot = RelationType::ALL.iter().position(|&r| r == relation).unwrap();
            per_relation[slot].push(edge);
        }

        let [hier_edges, temp_edges, causal_edges] = per_relation;
        let hierarchical =
            RelationGraph::new(RelationType::Hierarchical, events.clone(), hier_edges)?;
        let temporal = RelationGraph::new(RelationType::Temporal, events.clone(), temp_edges)?;
        let causal = RelationGraph::new(RelationType::Causal, events, causal_edges)?;
        EventGraphBundle::new(raw.document_id, hierarchical, temporal, causal)
    }
}
