use std::borrow::Cow;
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Where an event string came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventSource {
    Llm,
    Human,
    External,
}

/// A salient event rendered as a short natural-language string.
///
/// The text is normalized on construction: leading/trailing whitespace is
/// trimmed and internal whitespace runs collapse to a single space. Two
/// events are equal iff their case-folded normalized texts are equal; the
/// optional [`EventSource`] never participates in identity.
#[derive(Debug, Clone)]
pub struct Event {
    text: String,
    folded: String,
    source: Option<EventSource>,
}

impl Event {
    /// Builds an event from raw text, normalizing whitespace.
    ///
    /// Fails with [`GraphError::EmptyEventText`] when nothing remains after
    /// normalization.
    pub fn new(raw: &str) -> Result<Self, GraphError> {
        let text = normalize_text(raw);
        if text.is_empty() {
            return Err(GraphError::EmptyEventText);
        }
        let folded = text.to_lowercase();
        Ok(Event {
            text,
            folded,
            source: None,
        })
    }

    pub fn with_source(raw: &str, source: EventSource) -> Result<Self, GraphError> {
        let mut event = Event::new(raw)?;
        event.source = Some(source);
        Ok(event)
    }

    /// Normalized text, original casing preserved.
    pub fn text(&self) -> &str {
        &self.text
    }

    /// Case-folded identity key.
    pub fn folded(&self) -> &str {
        &self.folded
    }

    pub fn source(&self) -> Option<EventSource> {
        self.source
    }
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.folded == other.folded
    }
}

impl Eq for Event {}

impl Hash for Event {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.folded.hash(state);
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.folded
            .cmp(&other.folded)
            .then_with(|| self.text.cmp(&other.text))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for Event {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Event {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Cow::<str>::deserialize(deserializer)?;
        Event::new(&raw).map_err(serde::de::Error::custom)
    }
}

/// Trims and collapses internal whitespace runs to single spaces.
pub(crate) fn normalize_text(raw: &str) -> String {
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// The three relation types, in generation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationType {
    #[serde(rename = "is_subevent_of")]
    Hierarchical,
    #[serde(rename = "happened_before")]
    Temporal,
    #[serde(rename = "caused_by")]
    Causal,
}

impl RelationType {
    /// Generation order: hierarchical, then temporal, then causal.
    pub const ALL: [RelationType; 3] = [
        RelationType::Hierarchical,
        RelationType::Temporal,
        RelationType::Causal,
    ];

    /// Serialized relation name.
    pub fn as_str(self) -> &'static str {
        match self {
            RelationType::Hierarchical => "is_subevent_of",
            RelationType::Temporal => "happened_before",
            RelationType::Causal => "caused_by",
        }
    }

    /// Short human label used in prompts and reports.
    pub fn label(self) -> &'static str {
        match self {
            RelationType::Hierarchical => "hierarchical",
            RelationType::Temporal => "temporal",
            RelationType::Causal => "causal",
        }
    }

    /// Python variable name of this relation's graph in code prompts.
    pub fn graph_variable(self) -> &'static str {
        match self {
            RelationType::Hierarchical => "hierarchical_graph",
            RelationType::Temporal => "temporal_graph",
            RelationType::Causal => "causal_graph",
        }
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationType {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "is_subevent_of" => Ok(RelationType::Hierarchical),
            "happened_before" => Ok(RelationType::Temporal),
            "caused_by" => Ok(RelationType::Causal),
            other => Err(GraphError::UnknownRelationName {
                name: other.to_string(),
            }),
        }
    }
}

/// A typed directed edge between two distinct events.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationEdge {
    head: Event,
    tail: Event,
    relation: RelationType,
}

impl RelationEdge {
    /// Builds an edge, rejecting self-loops (all three relations are
    /// irreflexive).
    pub fn new(head: Event, tail: Event, relation: RelationType) -> Result<Self, GraphError> {
        if head == tail {
            return Err(GraphError::SelfLoop {
                event: head.text().to_string(),
            });
        }
        Ok(RelationEdge {
            head,
            tail,
            relation,
        })
    }

    pub fn head(&self) -> &Event {
        &self.head
    }

    pub fn tail(&self) -> &Event {
        &self.tail
    }

    pub fn relation(&self) -> RelationType {
        self.relation
    }
}

impl fmt::Display for RelationEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\" -[{}]-> \"{}\"", self.head, self.relation, self.tail)
    }
}
