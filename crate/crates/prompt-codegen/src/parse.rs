use std::collections::{BTreeSet, HashSet};

use event_graph_core::Event;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("no event tuples found in response")]
    NoEventTuples,

    #[error("grader response contains neither a yes nor a no token")]
    GraderParseError,
}

/// Outcome classification for a graph completion response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseStatus {
    Ok,
    FormatError,
}

/// Structured view of one graph completion response.
#[derive(Debug, Clone)]
pub struct ParsedGraphResponse {
    /// Endpoint-validated edges in response order, as canonical events
    /// from the allowed set. May contain repeats and self-pairs exactly as
    /// the model produced them.
    pub edges: Vec<(Event, Event)>,
    /// Raw string pairs whose endpoints did not match any allowed event.
    pub dropped: Vec<(String, String)>,
    /// Whether the response contained a fenced code block.
    pub had_code_block: bool,
    /// `FormatError` when the response has neither a parseable `add_edge`
    /// call nor a graph declaration line.
    pub parse_status: ParseStatus,
    pub raw_response: String,
}

/// A hallucination grader's binary judgment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraderVerdict {
    pub verdict: Verdict,
    pub explanation: String,
}

/// Extracts numbered event tuples like `1. (actor; trigger; object)` and
/// flattens each into an event ("actor trigger object", single-spaced).
/// A tuple needs at least two non-empty parts; surrounding prose is
/// ignored; duplicates (by event equality) are dropped keeping the first.
pub fn parse_event_list(response: &str) -> Result<Vec<Event>, ParseError> {
    let mut events: Vec<Event> = Vec::new();
    let mut seen: HashSet<Event> = HashSet::new();
    for line in response.lines() {
        for content in scan_numbered_tuples(line) {
            let parts: Vec<&str> = content
                .split(';')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .collect();
            if parts.len() < 2 {
                continue;
            }
            if let Ok(event) = Event::new(&parts.join(" ")) {
                if seen.insert(event.clone()) {
                    events.push(event);
                }
            }
        }
    }
    if events.is_empty() {
        return Err(ParseError::NoEventTuples);
    }
    Ok(events)
}

/// Finds `N. ( ... )` patterns in a line and returns the paren contents,
/// balancing nested parentheses.
fn scan_numbered_tuples(line: &str) -> Vec<String> {
    let chars: Vec<char> = line.chars().collect();
    let mut found = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].is_ascii_digit() || (i > 0 && chars[i - 1].is_alphanumeric()) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        if j >= chars.len() || !matches!(chars[j], '.' | ')') {
            i = j;
            continue;
        }
        j += 1;
        while j < chars.len() && chars[j].is_whitespace() {
            j += 1;
        }
        if j >= chars.len() || chars[j] != '(' {
            i = j;
            continue;
        }
        // Balanced paren scan.
        let mut depth = 0usize;
        let start = j + 1;
        let mut end = None;
        for (k, &c) in chars.iter().enumerate().skip(j) {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        end = Some(k);
                        break;
                    }
                }
                _ => {}
            }
        }
        match end {
            Some(k) => {
                found.push(chars[start..k].iter().collect());
                i = k + 1;
            }
            None => break,
        }
    }
    found
}

/// Scans a completion for `add_edge` calls with two string literals,
/// tolerating code fences, comments, single or double quotes, and calls
/// split over several lines.
///
/// When `receiver` is given, calls on a different graph variable (for
/// example prior-graph lines the model chose to echo) are ignored, which
/// mirrors reading one declared graph variable after running the code.
/// Bare `add_edge(...)` calls with no receiver always count.
///
/// Endpoints are normalized and matched against `allowed_events`; pairs
/// with an endpoint outside the set are reported in `dropped` instead.
/// The response is a format error only when it contains no syntactically
/// valid `add_edge` call and no graph declaration line.
pub fn parse_graph_response(
    response: &str,
    allowed_events: &[Event],
    receiver: Option<&str>,
) -> ParsedGraphResponse {
    let allowed: HashSet<&Event> = allowed_events.iter().collect();
    let mut edges = Vec::new();
    let mut dropped = Vec::new();
    let mut any_valid_call = false;

    for call in scan_add_edge_calls(response) {
        any_valid_call = true;
        if let (Some(expected), Some(actual)) = (receiver, call.receiver.as_deref()) {
            if actual != expected {
                continue;
            }
        }
        let head = Event::new(&call.head);
        let tail = Event::new(&call.tail);
        match (head, tail) {
            (Ok(head), Ok(tail)) => {
                match (allowed.get(&head), allowed.get(&tail)) {
                    (Some(&h), Some(&t)) => edges.push((h.clone(), t.clone())),
                    _ => dropped.push((call.head, call.tail)),
                }
            }
            _ => dropped.push((call.head, call.tail)),
        }
    }

    let has_declaration = response.contains("nx.DiGraph");
    let parse_status = if any_valid_call || has_declaration {
        ParseStatus::Ok
    } else {
        ParseStatus::FormatError
    };

    ParsedGraphResponse {
        edges: if parse_status == ParseStatus::FormatError {
            Vec::new()
        } else {
            edges
        },
        dropped,
        had_code_block: response.contains("```"),
        parse_status,
        raw_response: response.to_string(),
    }
}

struct AddEdgeCall {
    receiver: Option<String>,
    head: String,
    tail: String,
}

fn scan_add_edge_calls(text: &str) -> Vec<AddEdgeCall> {
    let bytes = text.as_bytes();
    let mut calls = Vec::new();
    let mut search_from = 0;

    while let Some(rel) = text[search_from..].find("add_edge") {
        let at = search_from + rel;
        search_from = at + "add_edge".len();

        // Token boundary on the left; a receiver is an identifier chain
        // ending in '.' directly before the call.
        let mut receiver = None;
        if at > 0 {
            let prev = bytes[at - 1];
            if prev == b'.' {
                let mut start = at - 1;
                while start > 0 && is_ident_byte(bytes[start - 1]) {
                    start -= 1;
                }
                if start < at - 1 {
                    receiver = Some(text[start..at - 1].to_string());
                }
            } else if is_ident_byte(prev) {
                continue; // part of a longer identifier
            }
        }

        let mut cursor = at + "add_edge".len();
        cursor = skip_space(text, cursor);
        if !text[cursor..].starts_with('(') {
            continue;
        }
        cursor += 1;

        cursor = skip_space_and_comments(text, cursor);
        let Some((head, after_head)) = lex_py_string(text, cursor) else {
            continue;
        };
        cursor = skip_space_and_comments(text, after_head);
        if !text[cursor..].starts_with(',') {
            continue;
        }
        cursor = skip_space_and_comments(text, cursor + 1);
        let Some((tail, after_tail)) = lex_py_string(text, cursor) else {
            continue;
        };
        cursor = skip_space_and_comments(text, after_tail);
        if text[cursor..].starts_with(',') {
            cursor = skip_space_and_comments(text, cursor + 1);
        }
        if !text[cursor..].starts_with(')') {
            continue;
        }

        calls.push(AddEdgeCall {
            receiver,
            head,
            tail,
        });
        search_from = cursor + 1;
    }
    calls
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

fn skip_space(text: &str, mut i: usize) -> usize {
    while i < text.len() && text[i..].starts_with(|c: char| c.is_whitespace()) {
        i += text[i..].chars().next().unwrap().len_utf8();
    }
    i
}

/// Skips whitespace and `#` comments (to end of line), so multi-line calls
/// with inline commentary still parse.
fn skip_space_and_comments(text: &str, mut i: usize) -> usize {
    loop {
        i = skip_space(text, i);
        if text[i..].starts_with('#') {
            match text[i..].find('\n') {
                Some(nl) => i += nl + 1,
                None => return text.len(),
            }
        } else {
            return i;
        }
    }
}

/// Lexes a single- or double-quoted Python string literal starting at `i`
/// (allowing one or two prefix letters such as `r` or `f`). Returns the
/// unescaped value and the index after the closing quote.
fn lex_py_string(text: &str, mut i: usize) -> Option<(String, usize)> {
    let mut prefix = 0;
    while prefix < 2 {
        match text[i..].chars().next() {
            Some(c) if c.is_ascii_alphabetic() => {
                i += 1;
                prefix += 1;
            }
            _ => break,
        }
    }
    let quote = match text[i..].chars().next() {
        Some(c @ ('"' | '\'')) => c,
        _ => return None,
    };
    i += 1;
    let mut value = String::new();
    let mut chars = text[i..].char_indices();
    while let Some((offset, c)) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some((_, escaped)) => value.push(match escaped {
                    'n' => '\n',
                    't' => '\t',
                    other => other,
                }),
                None => return None,
            }
        } else if c == quote {
            return Some((value, i + offset + c.len_utf8()));
        } else if c == '\n' {
            return None; // unterminated single-line literal
        } else {
            value.push(c);
        }
    }
    None
}

/// Finds the grader's binary verdict: the first standalone `yes`/`no`
/// token (case-insensitive), searched after a `Score:` marker when one is
/// present. The explanation is the text after an `Explanation:` marker, or
/// whatever follows the verdict token.
pub fn parse_grader(response: &str) -> Result<GraderVerdict, ParseError> {
    let lower = response.to_lowercase();
    let tokens = alphabetic_tokens(&lower);

    // The marker is the standalone token "score" directly followed by a
    // colon; a bare mention of the word does not move the search.
    let search_from = tokens
        .iter()
        .find(|&&(start, end)| {
            &lower[start..end] == "score" && lower[end..].trim_start().starts_with(':')
        })
        .map(|&(_, end)| end)
        .unwrap_or(0);

    let mut verdict = None;
    let mut verdict_end = 0;
    for &(start, end) in &tokens {
        if start < search_from {
            continue;
        }
        match &lower[start..end] {
            "yes" => {
                verdict = Some(Verdict::Yes);
                verdict_end = end;
            }
            "no" => {
                verdict = Some(Verdict::No);
                verdict_end = end;
            }
            _ => continue,
        }
        break;
    }
    let verdict = verdict.ok_or(ParseError::GraderParseError)?;

    let explanation = match lower.find("explanation") {
        Some(pos) => {
            let after = &response[pos + "explanation".len()..];
            after.trim_start_matches([':', ' ', '\t', '\n', '*']).trim().to_string()
        }
        None => response[verdict_end..]
            .trim_start_matches(['.', ',', ':', ';', ' ', '\t', '\n', '*'])
            .trim()
            .to_string(),
    };

    Ok(GraderVerdict {
        verdict,
        explanation,
    })
}

/// Byte ranges of contiguous ASCII-alphabetic runs.
fn alphabetic_tokens(text: &str) -> Vec<(usize, usize)> {
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c.is_ascii_alphabetic() {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            tokens.push((s, i));
        }
    }
    if let Some(s) = start {
        tokens.push((s, text.len()));
    }
    tokens
}

/// Collects parenthesized sentences from mention-detection responses and
/// maps each to a sentence index by normalized containment (either string
/// containing the other). Unmatched extractions are discarded.
pub fn parse_mentions(responses: &[String], sentences: &[String]) -> BTreeSet<usize> {
    let normalized_sentences: Vec<String> = sentences.iter().map(|s| fold(s)).collect();
    let mut indices = BTreeSet::new();
    for response in responses {
        for extract in scan_parenthesized(response) {
            let needle = fold(&extract);
            if needle.is_empty() {
                continue;
            }
            let matched = normalized_sentences
                .iter()
                .position(|s| s.contains(&needle) || needle.contains(s.as_str()));
            if let Some(idx) = matched {
                indices.insert(idx);
            }
        }
    }
    indices
}

fn fold(text: &str) -> String {
    text.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Outermost balanced `( ... )` groups.
fn scan_parenthesized(text: &str) -> Vec<String> {
    let mut groups = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '(' => {
                if depth == 0 {
                    start = i + 1;
                }
                depth += 1;
            }
            ')' if depth > 0 => {
                depth -= 1;
                if depth == 0 {
                    groups.push(text[start..i].to_string());
                }
            }
            _ => {}
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str) -> Event {
        Event::new(s).unwrap()
    }

    #[test]
    fn numbered_tuples_flatten_in_order() {
        let events = parse_event_list("1. (A; did; B)\n2. (C; ran)").unwrap();
        assert_eq!(events, vec![ev("A did B"), ev("C ran")]);
        assert_eq!(events[0].text(), "A did B");
    }

    #[test]
    fn duplicates_keep_first_and_prose_is_ignored() {
        let response = "Intro line.\n1. (A; did; B)\n2. (a; DID; b)\n3. (C; ran)\nNote that some of these events may be implicit.";
        let events = parse_event_list(response).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(events[0].text(), "A did B");
    }

    #[test]
    fn tuple_needs_two_parts() {
        assert!(parse_event_list("1. (just one part)").is_err());
        assert!(parse_event_list("no tuples at all").is_err());
    }

    #[test]
    fn nested_parens_stay_inside_the_tuple() {
        let events = parse_event_list("1. (the team (all of them); won; the cup)").unwrap();
        assert_eq!(events[0].text(), "the team (all of them) won the cup");
    }

    fn allowed() -> Vec<Event> {
        vec![ev("a happened"), ev("b happened"), ev("c happened")]
    }

    #[test]
    fn add_edge_calls_parse_with_either_quote_style() {
        let response = "g = nx.DiGraph()\nhierarchical_graph.add_edge(\"a happened\", 'b happened')";
        let parsed = parse_graph_response(response, &allowed(), None);
        assert_eq!(parsed.parse_status, ParseStatus::Ok);
        assert_eq!(parsed.edges, vec![(ev("a happened"), ev("b happened"))]);
    }

    #[test]
    fn multi_line_calls_and_fences_are_tolerated() {
        let response = "```python\ntemporal_graph.add_edge(\n    \"a happened\",  # first\n    \"c happened\"\n)\n```";
        let parsed = parse_graph_response(response, &allowed(), Some("temporal_graph"));
        assert!(parsed.had_code_block);
        assert_eq!(parsed.edges, vec![(ev("a happened"), ev("c happened"))]);
    }

    #[test]
    fn unknown_endpoint_goes_to_dropped() {
        let response = "temporal_graph.add_edge(\"a happened\", \"made-up event\")";
        let parsed = parse_graph_response(response, &allowed(), None);
        assert!(parsed.edges.is_empty());
        assert_eq!(
            parsed.dropped,
            vec![("a happened".to_string(), "made-up event".to_string())]
        );
        assert_eq!(parsed.parse_status, ParseStatus::Ok);
    }

    #[test]
    fn prose_only_response_is_a_format_error() {
        let parsed = parse_graph_response("I cannot help with that.", &allowed(), None);
        assert_eq!(parsed.parse_status, ParseStatus::FormatError);
        assert!(parsed.edges.is_empty());
    }

    #[test]
    fn declaration_without_edges_is_ok_and_empty() {
        let parsed = parse_graph_response(
            "causal_graph = nx.DiGraph()\n# no causal relations found",
            &allowed(),
            None,
        );
        assert_eq!(parsed.parse_status, ParseStatus::Ok);
        assert!(parsed.edges.is_empty());
    }

    #[test]
    fn receiver_filter_skips_prior_graph_echoes() {
        let response = "hierarchical_graph.add_edge(\"a happened\", \"b happened\")\ntemporal_graph.add_edge(\"b happened\", \"c happened\")";
        let parsed = parse_graph_response(response, &allowed(), Some("temporal_graph"));
        assert_eq!(parsed.edges, vec![(ev("b happened"), ev("c happened"))]);
    }

    #[test]
    fn variable_arguments_are_not_string_calls() {
        let response = "g.add_edge(event_list[0], event_list[1])\ng = nx.DiGraph()";
        let parsed = parse_graph_response(response, &allowed(), None);
        assert!(parsed.edges.is_empty());
        assert_eq!(parsed.parse_status, ParseStatus::Ok); // declaration present
    }

    #[test]
    fn endpoint_matching_normalizes_case_and_whitespace() {
        let response = "g.add_edge(\"A   Happened\", \"B HAPPENED\")";
        let parsed = parse_graph_response(response, &allowed(), None);
        assert_eq!(parsed.edges, vec![(ev("a happened"), ev("b happened"))]);
        // Canonical casing comes from the allowed set, not the response.
        assert_eq!(parsed.edges[0].0.text(), "a happened");
    }

    #[test]
    fn grader_score_marker_then_yes() {
        let verdict = parse_grader("Score: Yes\n\nExplanation: The answer is grounded.").unwrap();
        assert_eq!(verdict.verdict, Verdict::Yes);
        assert_eq!(verdict.explanation, "The answer is grounded.");
    }

    #[test]
    fn grader_bare_no_with_period() {
        let verdict = parse_grader("no.").unwrap();
        assert_eq!(verdict.verdict, Verdict::No);
    }

    #[test]
    fn grader_without_tokens_errors() {
        assert!(matches!(
            parse_grader("It depends."),
            Err(ParseError::GraderParseError)
        ));
    }

    #[test]
    fn grader_ignores_words_containing_no() {
        let verdict = parse_grader("Score: Nothing is certain, but yes overall.").unwrap();
        assert_eq!(verdict.verdict, Verdict::Yes);
    }

    #[test]
    fn grader_word_score_without_colon_is_not_a_marker() {
        // "scores" and a bare "score" must not swallow the verdict.
        let verdict = parse_grader("Yes, this answer scores well on grounding.").unwrap();
        assert_eq!(verdict.verdict, Verdict::Yes);
        let verdict = parse_grader("No. The score stands as final.").unwrap();
        assert_eq!(verdict.verdict, Verdict::No);
    }

    #[test]
    fn grader_trailing_verdict_token_is_found() {
        let verdict = parse_grader("after consideration the answer is yes").unwrap();
        assert_eq!(verdict.verdict, Verdict::Yes);
    }

    #[test]
    fn mention_extraction_matches_by_containment() {
        let sentences = vec![
            "The race began at dawn.".to_string(),
            "Crowds cheered loudly.".to_string(),
            "The winner collapsed at the line.".to_string(),
        ];
        let responses = vec!["The sentence is: (The winner collapsed at the line.)".to_string()];
        let indices = parse_mentions(&responses, &sentences);
        assert_eq!(indices, BTreeSet::from([2]));
    }

    #[test]
    fn unmatched_extraction_is_discarded() {
        let sentences = vec!["Only sentence here.".to_string()];
        let responses = vec!["(Entirely different text about something else.)".to_string()];
        assert!(parse_mentions(&responses, &sentences).is_empty());
    }

    #[test]
    fn multiple_responses_accumulate() {
        let sentences = vec!["S zero.".to_string(), "S one.".to_string(), "S two.".to_string()];
        let responses = vec!["(S one.)".to_string(), "I also found (S two.)".to_string()];
        assert_eq!(parse_mentions(&responses, &sentences), BTreeSet::from([1, 2]));
    }
}
