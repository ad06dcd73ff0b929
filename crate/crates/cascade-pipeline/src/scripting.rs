//! Fixture scripting for deterministic pipeline runs.
//!
//! A [`DocumentScript`] describes one document's planned exchange: the
//! summary response, the event-list response, per-relation graph
//! responses round by round, and grader verdicts per edge. Registering
//! the script renders exactly the prompts the pipeline will render
//! (simulating edge retention round over round with the same parse and
//! merge rules) and inserts one fixture per prompt into a
//! [`ScriptedProvider`].
//!
//! The simulation is deliberately strict: if the pipeline ever renders a
//! prompt the script did not anticipate, the provider returns a
//! fixture-missing error instead of a wrong response, so drift between
//! script and pipeline fails loudly.

use std::collections::HashMap;

use event_graph_core::{DocumentRecord, Event, RelationEdge, RelationGraph, RelationType};
use llm_gateway::{ScriptedProvider, StageTag};
use prompt_codegen::{
    parse_event_list, parse_grader, parse_graph_response, render_event_prompt,
    render_grader_prompt, render_graph_prompt, render_summary_prompt, TemplateSet, Verdict,
};

/// Planned graph-stage responses for one relation, one per round. The
/// last planned round should retain no new edge (or hit the round cap),
/// otherwise the pipeline will ask for a round the script never planned.
#[derive(Debug, Clone)]
pub struct RelationPlan {
    pub relation: RelationType,
    pub rounds: Vec<String>,
}

impl RelationPlan {
    pub fn new(relation: RelationType, rounds: Vec<String>) -> Self {
        RelationPlan { relation, rounds }
    }

    /// A single round declaring the graph with no edges.
    pub fn empty(relation: RelationType) -> Self {
        RelationPlan {
            relation,
            rounds: vec![format!(
                "{} = nx.DiGraph()\n# no relations found",
                relation.graph_variable()
            )],
        }
    }
}

/// A complete scripted exchange for one document.
#[derive(Debug, Clone)]
pub struct DocumentScript {
    pub document: DocumentRecord,
    pub summary_response: String,
    pub events_response: String,
    pub plans: Vec<RelationPlan>,
    /// Grader responses keyed by (relation, head, tail) event text; edges
    /// without an entry are graded with `default_grader_response`.
    pub grader_responses: HashMap<(RelationType, String, String), String>,
    pub default_grader_response: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ScriptError {
    #[error("script for {document_id}: events response does not parse")]
    UnparseableEvents { document_id: String },

    #[error(transparent)]
    Render(#[from] prompt_codegen::RenderError),

    #[error(transparent)]
    Graph(#[from] event_graph_core::GraphError),
}

impl DocumentScript {
    pub fn new(
        document: DocumentRecord,
        summary_response: impl Into<String>,
        events_response: impl Into<String>,
    ) -> Self {
        DocumentScript {
            document,
            summary_response: summary_response.into(),
            events_response: events_response.into(),
            plans: RelationType::ALL
                .iter()
                .map(|&rel| RelationPlan::empty(rel))
                .collect(),
            grader_responses: HashMap::new(),
            default_grader_response: "Score: yes\n\nExplanation: supported by the document.".to_string(),
        }
    }

    /// Replaces the plan for one relation.
    pub fn with_plan(mut self, plan: RelationPlan) -> Self {
        self.plans.retain(|p| p.relation != plan.relation);
        self.plans.push(plan);
        self
    }

    /// Sets the grader response for one edge.
    pub fn with_grader_response(
        mut self,
        relation: RelationType,
        head: &str,
        tail: &str,
        response: impl Into<String>,
    ) -> Self {
        self.grader_responses.insert(
            (relation, head.to_string(), tail.to_string()),
            response.into(),
        );
        self
    }

    fn plan_for(&self, relation: RelationType) -> RelationPlan {
        self.plans
            .iter()
            .find(|p| p.relation == relation)
            .cloned()
            .unwrap_or_else(|| RelationPlan::empty(relation))
    }

    /// Renders every prompt of the planned exchange and registers the
    /// fixtures. Returns the event list the pipeline will extract.
    pub fn register(
        &self,
        provider: &mut ScriptedProvider,
        templates: &TemplateSet,
    ) -> Result<Vec<Event>, ScriptError> {
        let summary_prompt = render_summary_prompt(templates, &self.document)?;
        provider.insert(StageTag::Summary, &summary_prompt, &self.summary_response);

        let event_prompt = render_event_prompt(templates, &self.summary_response)?;
        provider.insert(StageTag::Events, &event_prompt, &self.events_response);

        let events = parse_event_list(&self.events_response).map_err(|_| {
            ScriptError::UnparseableEvents {
                document_id: self.document.id.clone(),
            }
        })?;

        let mut completed: Vec<RelationGraph> = Vec::new();
        for relation in RelationType::ALL {
            let plan = self.plan_for(relation);
            let mut graph = RelationGraph::empty(relation, events.iter().cloned());
            let mut graded: HashMap<(Event, Event), bool> = HashMap::new();

            for response in &plan.rounds {
                let priors: Vec<&RelationGraph> = completed.iter().collect();
                let prompt = render_graph_prompt(
                    templates,
                    &self.document,
                    &events,
                    relation,
                    &priors,
                    graph.edges(),
                )?;
                provider.insert(StageTag::Graph, &prompt, response.clone());

                // Mirror the pipeline: grade new pairs, merge the yeses.
                let parsed =
                    parse_graph_response(response, &events, Some(relation.graph_variable()));
                let mut to_merge = Vec::new();
                for (head, tail) in parsed.edges {
                    if head == tail || graph.contains_edge(&head, &tail) {
                        continue;
                    }
                    let pair = (head.clone(), tail.clone());
                    let yes = match graded.get(&pair) {
                        Some(&verdict) => verdict,
                        None => {
                            let edge = RelationEdge::new(head.clone(), tail.clone(), relation)?;
                            let grader_prompt =
                                render_grader_prompt(templates, &self.document, &edge)?;
                            let response = self
                                .grader_responses
                                .get(&(
                                    relation,
                                    head.text().to_string(),
                                    tail.text().to_string(),
                                ))
                                .cloned()
                                .unwrap_or_else(|| self.default_grader_response.clone());
                            provider.insert(StageTag::Grader, &grader_prompt, &response);
                            // Same verdict rules as the pipeline,
                            // including parse-error-means-no.
                            let yes = parse_grader(&response)
                                .map(|g| g.verdict == Verdict::Yes)
                                .unwrap_or(false);
                            graded.insert(pair, yes);
                            yes
                        }
                    };
                    if yes {
                        to_merge.push(RelationEdge::new(head, tail, relation)?);
                    }
                }
                graph = graph.merge_edges(to_merge).graph;
            }
            completed.push(graph);
        }
        Ok(events)
    }
}
