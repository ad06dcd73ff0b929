//! Prompt rendering and response parsing for the graph generation stages.
//!
//! Rendering turns documents, event lists, and partially built relation
//! graphs into the stage prompts (summary, event extraction, per-relation
//! code completion, hallucination grading, mention detection). Parsing
//! goes the other way: numbered event tuples back into [`Event`]s,
//! `add_edge` calls out of code completions, yes/no verdicts out of grader
//! responses, and parenthesized sentences out of mention answers.
//!
//! All renderers are pure functions of their inputs; templates ship with
//! the crate and can be overridden from a directory so prompt variants can
//! be tested without rebuilds.

mod parse;
mod render;
mod template;

pub use parse::{
    parse_event_list, parse_grader, parse_graph_response, parse_mentions, GraderVerdict,
    ParseError, ParseStatus, ParsedGraphResponse, Verdict,
};
pub use render::{
    edge_statement, escape_triple_quotes, python_list_literal, python_string_literal,
    render_edge_calls, render_event_prompt, render_grader_prompt, render_graph_prompt,
    render_mention_prompts, render_summary_prompt,
};
pub use template::{PromptTemplate, RenderError, TemplateSet, SLOT_NAMES};

// Re-exported so downstream callers can name the event type without a
// separate dependency edge.
pub use event_graph_core::Event;
