use std::collections::HashMap;
use std::path::Path;

use event_graph_core::RelationType;
use thiserror::Error;

/// Slot names templates may reference.
pub const SLOT_NAMES: [&str; 7] = [
    "document",
    "summary",
    "event_list",
    "prior_graphs",
    "existing_edges",
    "event",
    "edge_statement",
];

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("template slot {{{slot}}} is unbound")]
    UnboundSlot { slot: String },

    #[error("document body is empty")]
    EmptyDocument,

    #[error("summary is empty")]
    EmptySummary,

    #[error("event list is empty")]
    EmptyEventList,

    #[error("prior graphs mismatch: expected {expected}, got {found}")]
    PriorGraphMismatch { expected: String, found: String },

    #[error("templates dir: {0}")]
    Io(#[from] std::io::Error),
}

/// One template with named `{slot}` markers.
#[derive(Debug, Clone)]
pub struct PromptTemplate {
    text: String,
}

impl PromptTemplate {
    pub fn new(text: impl Into<String>) -> Self {
        PromptTemplate { text: text.into() }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Substitutes every known slot in one pass. A known slot without a
    /// binding fails; braces that are not slot markers pass through, and
    /// substituted values are never rescanned.
    pub fn render(&self, bindings: &HashMap<&str, String>) -> Result<String, RenderError> {
        let mut out = String::with_capacity(self.text.len());
        let bytes = self.text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i] == b'{' {
                if let Some(end) = self.text[i + 1..].find('}') {
                    let name = &self.text[i + 1..i + 1 + end];
                    if SLOT_NAMES.contains(&name) {
                        match bindings.get(name) {
                            Some(value) => out.push_str(value),
                            None => {
                                return Err(RenderError::UnboundSlot {
                                    slot: name.to_string(),
                                })
                            }
                        }
                        i += name.len() + 2;
                        continue;
                    }
                }
            }
            let ch = self.text[i..].chars().next().unwrap();
            out.push(ch);
            i += ch.len_utf8();
        }
        Ok(out)
    }
}

/// The full set of stage templates, either built in or loaded from a
/// directory of override files.
#[derive(Debug, Clone)]
pub struct TemplateSet {
    pub summary: PromptTemplate,
    pub events: PromptTemplate,
    pub graph_hierarchical: PromptTemplate,
    pub graph_temporal: PromptTemplate,
    pub graph_causal: PromptTemplate,
    pub grader: PromptTemplate,
    pub mention_initial: PromptTemplate,
    pub mention_followup: PromptTemplate,
}

impl TemplateSet {
    /// Templates compiled into the crate.
    pub fn builtin() -> Self {
        TemplateSet {
            summary: PromptTemplate::new(include_str!("../templates/summary.txt")),
            events: PromptTemplate::new(include_str!("../templates/events.txt")),
            graph_hierarchical: PromptTemplate::new(include_str!(
                "../templates/graph_hierarchical.txt"
            )),
            graph_temporal: PromptTemplate::new(include_str!("../templates/graph_temporal.txt")),
            graph_causal: PromptTemplate::new(include_str!("../templates/graph_causal.txt")),
            grader: PromptTemplate::new(include_str!("../templates/grader.txt")),
            mention_initial: PromptTemplate::new(include_str!("../templates/mention_initial.txt")),
            mention_followup: PromptTemplate::new(include_str!(
                "../templates/mention_followup.txt"
            )),
        }
    }

    /// Builtin templates with per-file overrides from `dir`. A file named
    /// after a template (`summary.txt`, `graph_temporal.txt`, ...) replaces
    /// the builtin one; missing files keep the default.
    pub fn from_dir(dir: &Path) -> Result<Self, RenderError> {
        let mut set = TemplateSet::builtin();
        let slots: [(&str, &mut PromptTemplate); 8] = [
            ("summary.txt", &mut set.summary),
            ("events.txt", &mut set.events),
            ("graph_hierarchical.txt", &mut set.graph_hierarchical),
            ("graph_temporal.txt", &mut set.graph_temporal),
            ("graph_causal.txt", &mut set.graph_causal),
            ("grader.txt", &mut set.grader),
            ("mention_initial.txt", &mut set.mention_initial),
            ("mention_followup.txt", &mut set.mention_followup),
        ];
        for (file, slot) in slots {
            let path = dir.join(file);
            if path.is_file() {
                *slot = PromptTemplate::new(std::fs::read_to_string(&path)?);
            }
        }
        Ok(set)
    }

    pub fn graph_template(&self, relation: RelationType) -> &PromptTemplate {
        match relation {
            RelationType::Hierarchical => &self.graph_hierarchical,
            RelationType::Temporal => &self.graph_temporal,
            RelationType::Causal => &self.graph_causal,
        }
    }
}

impl Default for TemplateSet {
    fn default() -> Self {
        TemplateSet::builtin()
    }
}
