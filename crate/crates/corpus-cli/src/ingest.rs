use std::collections::HashSet;
use std::path::Path;

use anyhow::Context;
use event_graph_core::DocumentRecord;
use serde::Serialize;

/// A document excluded by the ingestion filter, with the reason.
#[derive(Debug, Clone, Serialize)]
pub struct ExcludedDocument {
    pub id: String,
    pub words: usize,
    pub reason: String,
}

/// Reads a JSON-lines corpus, one `{"id", "title", "body"}` object per
/// line. Blank lines are ignored; a malformed line is an error naming its
/// line number.
pub fn load_corpus(path: &Path) -> anyhow::Result<Vec<DocumentRecord>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading corpus {}", path.display()))?;
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: DocumentRecord = serde_json::from_str(line)
            .with_context(|| format!("corpus line {}", idx + 1))?;
        records.push(record);
    }
    Ok(records)
}

/// Keeps documents whose whitespace-token word count lies in
/// `[min_words, max_words]`, optionally restricted to an id allow-list.
pub fn filter_documents(
    records: Vec<DocumentRecord>,
    min_words: usize,
    max_words: usize,
    allow_ids: Option<&HashSet<String>>,
) -> (Vec<DocumentRecord>, Vec<ExcludedDocument>) {
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for record in records {
        let words = record.word_count();
        if let Some(ids) = allow_ids {
            if !ids.contains(&record.id) {
                excluded.push(ExcludedDocument {
                    id: record.id,
                    words,
                    reason: "not in id list".to_string(),
                });
                continue;
            }
        }
        if words < min_words {
            excluded.push(ExcludedDocument {
                id: record.id,
                words,
                reason: format!("too short ({words} < {min_words} words)"),
            });
        } else if words > max_words {
            excluded.push(ExcludedDocument {
                id: record.id,
                words,
                reason: format!("too long ({words} > {max_words} words)"),
            });
        } else {
            kept.push(record);
        }
    }
    (kept, excluded)
}
