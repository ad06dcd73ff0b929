use serde::{Deserialize, Serialize};

use crate::mentions::MentionSet;
use crate::{SaliencyError, SentenceDoc};

/// The three features for one event in one document. `mentioned` is false
/// when the mention set was empty, in which case the features take their
/// worst-case values (0, 1, 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaliencyScores {
    pub frequency: f64,
    pub first_appearance: f64,
    pub stretch_size: f64,
    pub mentioned: bool,
}

/// Exact formula application over a mention set.
///
/// With a single sentence (n = 0) the division by n is undefined; a
/// mentioned event then scores first appearance 0 and stretch 0, the
/// continuous limits.
pub fn saliency_scores(doc: &SentenceDoc, mentions: &MentionSet) -> SaliencyScores {
    if mentions.is_empty() {
        return SaliencyScores {
            frequency: 0.0,
            first_appearance: 1.0,
            stretch_size: 0.0,
            mentioned: false,
        };
    }
    let n = doc.sentence_count() - 1;
    let count = mentions.indices().len() as f64;
    let first = mentions.first().expect("non-empty") as f64;
    let last = mentions.last().expect("non-empty") as f64;

    let frequency = count / (n as f64 + 1.0);
    let (first_appearance, stretch_size) = if n == 0 {
        (0.0, 0.0)
    } else {
        (first / n as f64, (last - first) / n as f64)
    };
    SaliencyScores {
        frequency,
        first_appearance,
        stretch_size,
        mentioned: true,
    }
}

/// Unweighted means of the three features.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureMeans {
    pub frequency: f64,
    pub first_appearance: f64,
    pub stretch_size: f64,
}

impl FeatureMeans {
    fn accumulate(scores: &[SaliencyScores]) -> FeatureMeans {
        let n = scores.len() as f64;
        FeatureMeans {
            frequency: scores.iter().map(|s| s.frequency).sum::<f64>() / n,
            first_appearance: scores.iter().map(|s| s.first_appearance).sum::<f64>() / n,
            stretch_size: scores.iter().map(|s| s.stretch_size).sum::<f64>() / n,
        }
    }
}

/// Per-document saliency: one row per event plus the within-document mean.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DocSaliency {
    pub document_id: String,
    pub event_count: usize,
    pub unmentioned_events: usize,
    pub per_event: Vec<(String, SaliencyScores)>,
    pub mean: FeatureMeans,
}

/// Corpus-level report: mean over events within each document, then an
/// unweighted mean over documents. Documents with zero events are
/// excluded from the feature means and listed separately.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusSaliencyReport {
    pub documents: Vec<DocSaliency>,
    pub documents_without_events: Vec<String>,
    pub mean_event_count: f64,
    pub corpus_mean: FeatureMeans,
}

/// Runs a mention detector over every (document, events) pair and
/// aggregates. The detector is a closure so callers choose exact or
/// model-driven detection (and thread their own gateway through).
pub fn corpus_saliency<F>(
    docs: &[(SentenceDoc, Vec<event_graph_core::Event>)],
    mut detect: F,
) -> Result<CorpusSaliencyReport, SaliencyError>
where
    F: FnMut(&SentenceDoc, &event_graph_core::Event) -> Result<MentionSet, SaliencyError>,
{
    let mut documents = Vec::new();
    let mut documents_without_events = Vec::new();
    let mut total_events = 0usize;

    for (doc, events) in docs {
        total_events += events.len();
        if events.is_empty() {
            documents_without_events.push(doc.document_id().to_string());
            continue;
        }
        let mut per_event = Vec::with_capacity(events.len());
        let mut scores = Vec::with_capacity(events.len());
        let mut unmentioned = 0usize;
        for event in events {
            let mentions = detect(doc, event)?;
            let score = saliency_scores(doc, &mentions);
            if !score.mentioned {
                unmentioned += 1;
            }
            per_event.push((event.text().to_string(), score));
            scores.push(score);
        }
        documents.push(DocSaliency {
            document_id: doc.document_id().to_string(),
            event_count: events.len(),
            unmentioned_events: unmentioned,
            mean: FeatureMeans::accumulate(&scores),
            per_event,
        });
    }

    let doc_count = documents.len() as f64;
    let corpus_mean = if documents.is_empty() {
        FeatureMeans::default()
    } else {
        FeatureMeans {
            frequency: documents.iter().map(|d| d.mean.frequency).sum::<f64>() / doc_count,
            first_appearance: documents.iter().map(|d| d.mean.first_appearance).sum::<f64>()
                / doc_count,
            stretch_size: documents.iter().map(|d| d.mean.stretch_size).sum::<f64>() / doc_count,
        }
    };

    Ok(CorpusSaliencyReport {
        mean_event_count: total_events as f64 / docs.len().max(1) as f64,
        documents,
        documents_without_events,
        corpus_mean,
    })
}
