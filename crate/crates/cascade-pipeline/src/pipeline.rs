use std::collections::HashMap;

use event_graph_core::{
    DocumentRecord, Event, EventGraphBundle, RejectReason, RelationEdge, RelationGraph,
    RelationType,
};
use llm_gateway::{GenerationRequest, StageTag, TextGenerator};
use log::{debug, warn};
use prompt_codegen::{
    parse_event_list, parse_grader, parse_graph_response, render_event_prompt,
    render_grader_prompt, render_graph_prompt, render_summary_prompt, ParseStatus, TemplateSet,
    Verdict,
};

use crate::config::PipelineConfig;
use crate::trace::{GradeRecord, PipelineTrace, RelationTrace, RoundTrace};
use crate::PipelineError;

/// Everything a pipeline run needs: a generator backend, the prompt
/// templates, and the knobs.
#[derive(Clone, Copy)]
pub struct PipelineContext<'a> {
    pub generator: &'a dyn TextGenerator,
    pub templates: &'a TemplateSet,
    pub config: &'a PipelineConfig,
}

impl<'a> PipelineContext<'a> {
    fn complete(
        &self,
        stage: StageTag,
        prompt: String,
        document_id: &str,
        relation: Option<RelationType>,
        round: Option<usize>,
    ) -> Result<String, PipelineError> {
        let request = GenerationRequest::for_stage(stage, prompt, &self.config.stage_params)
            .map_err(|source| PipelineError::Gateway {
                document_id: document_id.to_string(),
                stage,
                relation,
                round,
                source,
            })?;
        self.generator
            .complete(&request)
            .map_err(|source| PipelineError::Gateway {
                document_id: document_id.to_string(),
                stage,
                relation,
                round,
                source,
            })
    }
}

/// Summary first, then salient events extracted from the summary.
/// Returns the summary text and at least one event, or a document-skip
/// error when the event response parses to nothing.
pub fn generate_salient_events(
    ctx: &PipelineContext<'_>,
    document: &DocumentRecord,
) -> Result<(String, Vec<Event>), PipelineError> {
    let summary_prompt = render_summary_prompt(ctx.templates, document)?;
    let summary = ctx.complete(StageTag::Summary, summary_prompt, &document.id, None, None)?;

    let event_prompt = render_event_prompt(ctx.templates, &summary)?;
    let response = ctx.complete(StageTag::Events, event_prompt, &document.id, None, None)?;

    match parse_event_list(&response) {
        Ok(events) => Ok((summary, events)),
        Err(_) => Err(PipelineError::NoSalientEvents {
            document_id: document.id.clone(),
        }),
    }
}

/// Iterative generate-then-grade loop for one relation type.
///
/// Each round renders the code prompt with the edges retained so far,
/// parses the completion, grades every newly proposed edge (verdicts are
/// cached for the whole run, so a re-proposed edge is never re-graded),
/// and merges the yes-graded edges, rejecting cycle formers. Stops early
/// on the first round that retains nothing new.
pub fn generate_relation_graph(
    ctx: &PipelineContext<'_>,
    document: &DocumentRecord,
    events: &[Event],
    relation: RelationType,
    priors: &[&RelationGraph],
) -> Result<(RelationGraph, RelationTrace), PipelineError> {
    let mut graph = RelationGraph::empty(relation, events.iter().cloned());
    let mut verdicts: HashMap<(Event, Event), (Verdict, bool)> = HashMap::new();
    let mut rounds: Vec<RoundTrace> = Vec::new();
    let mut stopped_early = false;

    for round in 1..=ctx.config.max_rounds.max(1) {
        let prompt =
            render_graph_prompt(ctx.templates, document, events, relation, priors, graph.edges())?;
        let response = ctx.complete(
            StageTag::Graph,
            prompt,
            &document.id,
            Some(relation),
            Some(round),
        )?;
        let parsed =
            parse_graph_response(&response, events, Some(relation.graph_variable()));

        let mut trace = RoundTrace {
            round,
            parse_status: parsed.parse_status,
            had_code_block: parsed.had_code_block,
            parsed_edges: parsed
                .edges
                .iter()
                .map(|(h, t)| (h.text().to_string(), t.text().to_string()))
                .collect(),
            dropped_endpoints: parsed.dropped.clone(),
            graded: Vec::new(),
            retained: Vec::new(),
            rejected_cycle: Vec::new(),
            duplicates: Vec::new(),
        };

        if parsed.parse_status == ParseStatus::FormatError {
            warn!(
                "document {} {relation} round {round}: format error in graph response",
                document.id
            );
        }

        // Grade newly proposed edges, oldest first, deduplicated within
        // the round.
        let mut to_merge: Vec<RelationEdge> = Vec::new();
        let mut seen_this_round: Vec<(Event, Event)> = Vec::new();
        for (head, tail) in &parsed.edges {
            let pair = (head.clone(), tail.clone());
            if head == tail {
                trace
                    .rejected_cycle
                    .push((head.text().to_string(), tail.text().to_string()));
                continue;
            }
            if graph.contains_edge(head, tail) {
                trace
                    .duplicates
                    .push((head.text().to_string(), tail.text().to_string()));
                continue;
            }
            if seen_this_round.contains(&pair) {
                trace
                    .duplicates
                    .push((head.text().to_string(), tail.text().to_string()));
                continue;
            }
            seen_this_round.push(pair.clone());

            let (verdict, parse_failed, cached) = match verdicts.get(&pair) {
                Some(&(verdict, parse_failed)) => (verdict, parse_failed, true),
                None => {
                    let edge = RelationEdge::new(head.clone(), tail.clone(), relation)?;
                    let grader_prompt = render_grader_prompt(ctx.templates, document, &edge)?;
                    let grader_response = ctx.complete(
                        StageTag::Grader,
                        grader_prompt,
                        &document.id,
                        Some(relation),
                        Some(round),
                    )?;
                    let (verdict, parse_failed) = match parse_grader(&grader_response) {
                        Ok(graded) => (graded.verdict, false),
                        Err(_) => {
                            warn!(
                                "document {} {relation} round {round}: unparseable grader response, treating as no",
                                document.id
                            );
                            (Verdict::No, true)
                        }
                    };
                    verdicts.insert(pair.clone(), (verdict, parse_failed));
                    (verdict, parse_failed, false)
                }
            };
            trace.graded.push(GradeRecord {
                head: head.text().to_string(),
                tail: tail.text().to_string(),
                verdict,
                cached,
                parse_failed,
            });
            if verdict == Verdict::Yes {
                to_merge.push(RelationEdge::new(head.clone(), tail.clone(), relation)?);
            }
        }

        let outcome = graph.merge_edges(to_merge.clone());
        let mut rejected_pairs: Vec<(Event, Event)> = Vec::new();
        for rejected in &outcome.rejected {
            let pair_text = (
                rejected.edge.head().text().to_string(),
                rejected.edge.tail().text().to_string(),
            );
            rejected_pairs.push((rejected.edge.head().clone(), rejected.edge.tail().clone()));
            match rejected.reason {
                RejectReason::WouldCycle => trace.rejected_cycle.push(pair_text),
                RejectReason::Duplicate => trace.duplicates.push(pair_text),
                RejectReason::UnknownEndpoint | RejectReason::RelationMismatch => {
                    debug!("unexpected merge rejection: {:?}", rejected.reason);
                }
            }
        }
        for edge in &to_merge {
            let pair = (edge.head().clone(), edge.tail().clone());
            if !rejected_pairs.contains(&pair) {
                trace
                    .retained
                    .push((edge.head().text().to_string(), edge.tail().text().to_string()));
            }
        }
        graph = outcome.graph;

        let new_retained = trace.retained.len();
        rounds.push(trace);
        if ctx.config.early_stop_on_no_new_edges && new_retained == 0 {
            stopped_early = true;
            break;
        }
    }

    let final_edges = graph
        .edges()
        .iter()
        .map(|e| (e.head().text().to_string(), e.tail().text().to_string()))
        .collect();
    Ok((
        graph,
        RelationTrace {
            relation,
            rounds,
            final_edges,
            stopped_early,
        },
    ))
}

/// Full cascade for one document: length filter, summary, events, then
/// the three relation graphs in order with their finished predecessors as
/// priors. Relations excluded by configuration yield empty graphs.
pub fn run_document(
    ctx: &PipelineContext<'_>,
    document: &DocumentRecord,
) -> Result<(EventGraphBundle, PipelineTrace), PipelineError> {
    if document.body.trim().is_empty() {
        return Err(PipelineError::EmptyDocument {
            document_id: document.id.clone(),
        });
    }
    let words = document.word_count();
    if words < ctx.config.min_words {
        return Err(PipelineError::DocumentTooShort {
            document_id: document.id.clone(),
            words,
            min: ctx.config.min_words,
        });
    }
    if words > ctx.config.max_words {
        return Err(PipelineError::DocumentTooLong {
            document_id: document.id.clone(),
            words,
            max: ctx.config.max_words,
        });
    }

    let (summary, events) = generate_salient_events(ctx, document)?;

    let selected = ctx.config.ordered_relations();
    let mut graphs: Vec<RelationGraph> = RelationType::ALL
        .iter()
        .map(|&rel| RelationGraph::empty(rel, events.iter().cloned()))
        .collect();
    let mut relation_traces = Vec::new();

    for relation in selected {
        let slot = RelationType::ALL.iter().position(|&r| r == relation).unwrap();
        let priors: Vec<&RelationGraph> = graphs[..slot].iter().collect();
        let (graph, trace) =
            generate_relation_graph(ctx, document, &events, relation, &priors)?;
        graphs[slot] = graph;
        relation_traces.push(trace);
    }

    let mut graphs = graphs.into_iter();
    let (hierarchical, temporal, causal) = (
        graphs.next().unwrap(),
        graphs.next().unwrap(),
        graphs.next().unwrap(),
    );
    let bundle = EventGraphBundle::new(&document.id, hierarchical, temporal, causal)?;
    let trace = PipelineTrace {
        document_id: document.id.clone(),
        summary,
        events: events.iter().map(|e| e.text().to_string()).collect(),
        relations: relation_traces,
    };
    Ok((bundle, trace))
}
