//! Sentence-level saliency features for events.
//!
//! For a document of sentences `s0 ... sn` and the set `M(e)` of sentence
//! indices mentioning event `e`:
//!
//! * frequency        = |M(e)| / (n + 1)
//! * first appearance = i / n          (i the first mention index)
//! * stretch size     = (k - i) / n    (k the last mention index)
//!
//! Mentions come either from lemmatized exact matching
//! ([`detect_mentions_exact`]) or from iterative model prompting
//! ([`detect_mentions_llm`]).

mod lemma;
mod mentions;
mod scores;

pub use lemma::{Lemmatizer, NaiveLemmatizer};
pub use mentions::{detect_mentions_exact, detect_mentions_llm, MentionSet};
pub use scores::{
    corpus_saliency, saliency_scores, CorpusSaliencyReport, DocSaliency, FeatureMeans,
    SaliencyScores,
};

use std::collections::BTreeSet;

use event_graph_core::DocumentRecord;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SaliencyError {
    #[error("document has no sentences")]
    NoSentences,

    #[error("mention index {index} out of range for {sentences} sentences")]
    IndexOutOfRange { index: usize, sentences: usize },

    #[error(transparent)]
    Gateway(#[from] llm_gateway::GatewayError),

    #[error(transparent)]
    Render(#[from] prompt_codegen::RenderError),
}

/// A document with sentence segmentation and a parallel lemmatized view.
#[derive(Debug, Clone)]
pub struct SentenceDoc {
    document_id: String,
    body: String,
    sentences: Vec<String>,
    lemmas: Vec<Vec<String>>,
}

impl SentenceDoc {
    pub fn new(
        document_id: impl Into<String>,
        sentences: Vec<String>,
        lemmatizer: &dyn Lemmatizer,
    ) -> Result<Self, SaliencyError> {
        if sentences.is_empty() {
            return Err(SaliencyError::NoSentences);
        }
        let body = sentences.join(" ");
        let lemmas = sentences
            .iter()
            .map(|s| lemma::lemma_tokens(s, lemmatizer))
            .collect();
        Ok(SentenceDoc {
            document_id: document_id.into(),
            body,
            sentences,
            lemmas,
        })
    }

    pub fn from_record(
        record: &DocumentRecord,
        lemmatizer: &dyn Lemmatizer,
    ) -> Result<Self, SaliencyError> {
        let sentences = record.sentences();
        if sentences.is_empty() {
            return Err(SaliencyError::NoSentences);
        }
        let lemmas = sentences
            .iter()
            .map(|s| lemma::lemma_tokens(s, lemmatizer))
            .collect();
        Ok(SentenceDoc {
            document_id: record.id.clone(),
            body: record.body.clone(),
            sentences,
            lemmas,
        })
    }

    pub fn document_id(&self) -> &str {
        &self.document_id
    }

    /// Original body text (used for mention prompts).
    pub fn body(&self) -> &str {
        &self.body
    }

    pub fn sentences(&self) -> &[String] {
        &self.sentences
    }

    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    pub fn lemmas(&self) -> &[Vec<String>] {
        &self.lemmas
    }

    pub(crate) fn check_indices(&self, indices: &BTreeSet<usize>) -> Result<(), SaliencyError> {
        for &index in indices {
            if index >= self.sentences.len() {
                return Err(SaliencyError::IndexOutOfRange {
                    index,
                    sentences: self.sentences.len(),
                });
            }
        }
        Ok(())
    }
}
