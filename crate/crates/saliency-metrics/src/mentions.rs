use std::collections::BTreeSet;

use event_graph_core::{DocumentRecord, Event};
use llm_gateway::{GenerationRequest, StageParams, StageTag, TextGenerator};
use prompt_codegen::{parse_mentions, render_mention_prompts, TemplateSet};

use crate::lemma::{lemma_tokens, Lemmatizer};
use crate::{SaliencyError, SentenceDoc};

/// Followup prompts stop after this many rounds even if the model keeps
/// naming new sentences; mirrors the pipeline's refinement cap.
const MAX_FOLLOWUPS: usize = 5;

/// The sentence indices mentioning one event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MentionSet {
    event: Event,
    indices: BTreeSet<usize>,
}

impl MentionSet {
    pub fn new(
        event: Event,
        indices: BTreeSet<usize>,
        doc: &SentenceDoc,
    ) -> Result<Self, SaliencyError> {
        doc.check_indices(&indices)?;
        Ok(MentionSet { event, indices })
    }

    pub fn event(&self) -> &Event {
        &self.event
    }

    pub fn indices(&self) -> &BTreeSet<usize> {
        &self.indices
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.indices.iter().next().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.indices.iter().next_back().copied()
    }
}

/// Lemmatized exact matching: sentence `s` mentions the event iff the
/// event's lemma sequence occurs as a contiguous subsequence of the
/// sentence's lemma sequence.
pub fn detect_mentions_exact(
    doc: &SentenceDoc,
    event: &Event,
    lemmatizer: &dyn Lemmatizer,
) -> MentionSet {
    let needle = lemma_tokens(event.text(), lemmatizer);
    let mut indices = BTreeSet::new();
    if !needle.is_empty() {
        for (idx, haystack) in doc.lemmas().iter().enumerate() {
            if haystack.len() >= needle.len()
                && haystack.windows(needle.len()).any(|w| w == needle.as_slice())
            {
                indices.insert(idx);
            }
        }
    }
    MentionSet {
        event: event.clone(),
        indices,
    }
}

/// Model-driven mention detection: ask which sentence mentions the event,
/// then keep asking for any other sentence until a followup yields nothing
/// new or the followup cap is reached. Each round extends a running
/// transcript so scripted fixtures see distinct prompts per round.
pub fn detect_mentions_llm(
    doc: &SentenceDoc,
    event: &Event,
    generator: &dyn TextGenerator,
    templates: &TemplateSet,
    params: &StageParams,
) -> Result<MentionSet, SaliencyError> {
    let record = DocumentRecord::new(doc.document_id(), "", doc.body());
    let (initial, followup) = render_mention_prompts(templates, &record, event)?;

    let mut transcript = initial;
    let request = GenerationRequest::for_stage(StageTag::Mention, transcript.clone(), params)?;
    let response = generator.complete(&request)?;
    let mut found = parse_mentions(std::slice::from_ref(&response), doc.sentences());

    if !found.is_empty() {
        let mut last_response = response;
        for _ in 0..MAX_FOLLOWUPS {
            transcript = format!("{transcript}\n{last_response}\n\n{followup}");
            let request =
                GenerationRequest::for_stage(StageTag::Mention, transcript.clone(), params)?;
            let response = generator.complete(&request)?;
            let new_indices = parse_mentions(std::slice::from_ref(&response), doc.sentences());
            let novel: Vec<usize> = new_indices.difference(&found).copied().collect();
            if novel.is_empty() {
                break;
            }
            found.extend(novel);
            last_response = response;
        }
    }

    MentionSet::new(event.clone(), found, doc)
}
