use std::collections::HashMap;

use event_graph_core::{DocumentRecord, Event, RelationEdge, RelationGraph, RelationType};

use crate::template::{RenderError, TemplateSet};

/// Escapes quote runs of length three or more so a value embedded in a
/// triple-quoted block can never terminate the block early. Shorter quote
/// runs (and everything else) are preserved verbatim.
pub fn escape_triple_quotes(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '"' {
            out.push(c);
            continue;
        }
        let mut run = 1;
        while chars.peek() == Some(&'"') {
            chars.next();
            run += 1;
        }
        for _ in 0..run {
            if run >= 3 {
                out.push('\\');
            }
            out.push('"');
        }
    }
    out
}

/// A double-quoted Python string literal with backslash and quote escapes.
pub fn python_string_literal(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out.push('"');
    out
}

/// A Python list literal over the event texts.
pub fn python_list_literal(events: &[Event]) -> String {
    let items: Vec<String> = events
        .iter()
        .map(|e| python_string_literal(e.text()))
        .collect();
    format!("[{}]", items.join(", "))
}

/// Renders edges as `add_edge` calls on their relation's graph variable,
/// one per line. Parsing this text back with the same event set yields
/// exactly the input edges in order.
pub fn render_edge_calls(edges: &[RelationEdge]) -> String {
    edges
        .iter()
        .map(|edge| {
            format!(
                "{}.add_edge({}, {})",
                edge.relation().graph_variable(),
                python_string_literal(edge.head().text()),
                python_string_literal(edge.tail().text())
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Summarisation prompt: the document body inlined in a triple-quoted
/// block.
pub fn render_summary_prompt(
    templates: &TemplateSet,
    document: &DocumentRecord,
) -> Result<String, RenderError> {
    if document.body.trim().is_empty() {
        return Err(RenderError::EmptyDocument);
    }
    let mut bindings = HashMap::new();
    bindings.insert("document", escape_triple_quotes(&document.body));
    templates.summary.render(&bindings)
}

/// Salient event extraction prompt over a generated summary.
pub fn render_event_prompt(templates: &TemplateSet, summary: &str) -> Result<String, RenderError> {
    if summary.trim().is_empty() {
        return Err(RenderError::EmptySummary);
    }
    let mut bindings = HashMap::new();
    bindings.insert("summary", escape_triple_quotes(summary));
    templates.events.render(&bindings)
}

fn prior_graph_block(graph: &RelationGraph) -> String {
    let variable = graph.relation().graph_variable();
    let meaning = match graph.relation() {
        RelationType::Hierarchical => "the head event is a subevent of the tail event",
        RelationType::Temporal => "the head event happened before the tail event",
        RelationType::Causal => "the head event is caused by the tail event",
    };
    let mut block = format!(
        "# The following is the {} relation graph between the events in the document. An edge means {}.\n{} = nx.DiGraph()\nfor event in event_list:\n    {}.add_node(event)\n",
        graph.relation().label(),
        meaning,
        variable,
        variable
    );
    if graph.edge_count() > 0 {
        block.push_str(&render_edge_calls(graph.edges()));
        block.push('\n');
    }
    block.push('\n');
    block
}

/// Code-completion prompt for one relation graph.
///
/// `priors` must hold exactly the graphs the relation order requires:
/// none for hierarchical, the hierarchical graph for temporal, and the
/// hierarchical plus temporal graphs for causal. `existing_edges` are
/// edges retained from earlier refinement rounds, re-inserted as already
/// written `add_edge` calls.
pub fn render_graph_prompt(
    templates: &TemplateSet,
    document: &DocumentRecord,
    events: &[Event],
    relation: RelationType,
    priors: &[&RelationGraph],
    existing_edges: &[RelationEdge],
) -> Result<String, RenderError> {
    if events.is_empty() {
        return Err(RenderError::EmptyEventList);
    }
    let expected: &[RelationType] = match relation {
        RelationType::Hierarchical => &[],
        RelationType::Temporal => &[RelationType::Hierarchical],
        RelationType::Causal => &[RelationType::Hierarchical, RelationType::Temporal],
    };
    let found: Vec<RelationType> = priors.iter().map(|g| g.relation()).collect();
    if found != expected {
        return Err(RenderError::PriorGraphMismatch {
            expected: format!("{expected:?}"),
            found: format!("{found:?}"),
        });
    }

    let prior_blocks: String = priors.iter().map(|g| prior_graph_block(g)).collect();
    let existing = if existing_edges.is_empty() {
        String::new()
    } else {
        let mut calls = render_edge_calls(existing_edges);
        calls.push('\n');
        calls
    };

    let mut bindings = HashMap::new();
    bindings.insert("document", escape_triple_quotes(&document.body));
    bindings.insert("event_list", python_list_literal(events));
    bindings.insert("prior_graphs", prior_blocks);
    bindings.insert("existing_edges", existing);
    templates.graph_template(relation).render(&bindings)
}

/// The grader's answer sentence for one edge, phrased in the stored edge
/// direction.
pub fn edge_statement(edge: &RelationEdge) -> String {
    let (head, tail) = (edge.head().text(), edge.tail().text());
    match edge.relation() {
        RelationType::Hierarchical => {
            format!("Event \"{head}\" is a subevent of event \"{tail}\".")
        }
        RelationType::Temporal => format!("Event \"{head}\" happened before event \"{tail}\"."),
        RelationType::Causal => format!("Event \"{head}\" is caused by event \"{tail}\"."),
    }
}

/// Hallucination grader prompt for one proposed edge.
pub fn render_grader_prompt(
    templates: &TemplateSet,
    document: &DocumentRecord,
    edge: &RelationEdge,
) -> Result<String, RenderError> {
    if document.body.trim().is_empty() {
        return Err(RenderError::EmptyDocument);
    }
    let mut bindings = HashMap::new();
    bindings.insert("document", escape_triple_quotes(&document.body));
    bindings.insert("edge_statement", edge_statement(edge));
    templates.grader.render(&bindings)
}

/// Mention-detection prompts: the initial question and the reusable
/// followup asking for any other sentence.
pub fn render_mention_prompts(
    templates: &TemplateSet,
    document: &DocumentRecord,
    event: &Event,
) -> Result<(String, String), RenderError> {
    if document.body.trim().is_empty() {
        return Err(RenderError::EmptyDocument);
    }
    let mut bindings = HashMap::new();
    bindings.insert("document", escape_triple_quotes(&document.body));
    bindings.insert("event", event.text().to_string());
    let initial = templates.mention_initial.render(&bindings)?;
    let followup = templates.mention_followup.render(&bindings)?;
    Ok((initial, followup))
}
