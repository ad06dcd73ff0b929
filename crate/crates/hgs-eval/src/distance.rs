use std::collections::HashMap;

use event_graph_core::{Event, RelationEdge};
use llm_gateway::{EmbeddingVector, TextEmbedder};

use crate::error::HgsError;

/// Embeddings for a set of events, computed once per unique event text.
#[derive(Debug, Clone)]
pub struct EventEmbeddings {
    map: HashMap<Event, EmbeddingVector>,
}

impl EventEmbeddings {
    /// Embeds every distinct event (by event equality) in one batched
    /// call.
    pub fn build<'a>(
        events: impl IntoIterator<Item = &'a Event>,
        embedder: &dyn TextEmbedder,
    ) -> Result<Self, HgsError> {
        let mut unique: Vec<Event> = Vec::new();
        let mut seen: HashMap<Event, ()> = HashMap::new();
        for event in events {
            if seen.insert(event.clone(), ()).is_none() {
                unique.push(event.clone());
            }
        }
        if unique.is_empty() {
            return Ok(EventEmbeddings {
                map: HashMap::new(),
            });
        }
        let texts: Vec<String> = unique.iter().map(|e| e.text().to_string()).collect();
        let vectors = embedder.embed(&texts)?;
        Ok(EventEmbeddings {
            map: unique.into_iter().zip(vectors).collect(),
        })
    }

    pub fn get(&self, event: &Event) -> Result<&EmbeddingVector, HgsError> {
        self.map.get(event).ok_or_else(|| HgsError::MissingEmbedding {
            event: event.text().to_string(),
        })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Distance between two edges of one relation type: the larger of the
/// head-pair and tail-pair cosine distances, each clamped into [0, 1] so
/// costs stay compatible with padding value 1.
pub fn edge_distance(
    left: &RelationEdge,
    right: &RelationEdge,
    embeddings: &EventEmbeddings,
) -> Result<f64, HgsError> {
    if left.relation() != right.relation() {
        return Err(HgsError::RelationMismatch {
            left: left.relation().to_string(),
            right: right.relation().to_string(),
        });
    }
    let head_distance = embeddings
        .get(left.head())?
        .cosine_distance(embeddings.get(right.head())?)?;
    let tail_distance = embeddings
        .get(left.tail())?
        .cosine_distance(embeddings.get(right.tail())?)?;
    Ok(head_distance.clamp(0.0, 1.0).max(tail_distance.clamp(0.0, 1.0)))
}
