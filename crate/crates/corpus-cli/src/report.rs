//! Plain-text report tables mirroring the JSON reports.

use hgs_eval::{AgreementScore, CorpusHgsReport};
use saliency_metrics::CorpusSaliencyReport;

use crate::stats::FormatStats;

fn fmt_opt(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.3}"),
        None => "  n/a".to_string(),
    }
}

/// Per-relation PHGS / RHGS / HGS table.
pub fn hgs_table(report: &CorpusHgsReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<16} {:>8} {:>8} {:>8} {:>12} {:>8}\n",
        "Relation", "PHGS", "RHGS", "HGS", "Gold edges", "Docs"
    ));
    for row in &report.per_relation {
        out.push_str(&format!(
            "{:<16} {:>8} {:>8} {:>8} {:>12} {:>8}\n",
            row.relation.label(),
            fmt_opt(row.phgs),
            fmt_opt(row.rhgs),
            fmt_opt(row.hgs),
            row.total_gold_edges,
            row.weighted_documents,
        ));
    }
    if report.use_closure {
        out.push_str("(scores computed on transitive closures)\n");
    }
    out
}

/// Saliency feature table, one row per document plus the corpus mean,
/// with the three features as percentages.
pub fn saliency_table(report: &CorpusSaliencyReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<24} {:>8} {:>12} {:>18} {:>14}\n",
        "Document", "Events", "Frequency", "First appearance", "Stretch size"
    ));
    for doc in &report.documents {
        out.push_str(&format!(
            "{:<24} {:>8} {:>11.1}% {:>17.1}% {:>13.1}%\n",
            doc.document_id,
            doc.event_count,
            doc.mean.frequency * 100.0,
            doc.mean.first_appearance * 100.0,
            doc.mean.stretch_size * 100.0,
        ));
    }
    out.push_str(&format!(
        "{:<24} {:>8.2} {:>11.1}% {:>17.1}% {:>13.1}%\n",
        "corpus mean",
        report.mean_event_count,
        report.corpus_mean.frequency * 100.0,
        report.corpus_mean.first_appearance * 100.0,
        report.corpus_mean.stretch_size * 100.0,
    ));
    if !report.documents_without_events.is_empty() {
        out.push_str(&format!(
            "({} document(s) with zero events excluded)\n",
            report.documents_without_events.len()
        ));
    }
    out
}

/// Format-error / cycle statistics table.
pub fn stats_table(stats: &FormatStats) -> String {
    let mut out = String::new();
    out.push_str(&format!("Documents: {}\n", stats.documents_total));
    out.push_str(&format!(
        "Format errors: {} ({:.1}%)\nCycles: {} ({:.1}%)\n",
        stats.format_error_documents,
        stats.format_error_pct,
        stats.cycle_documents,
        stats.cycle_pct
    ));
    out.push_str(&format!(
        "{:<18} {:>14} {:>8}\n",
        "Relation", "Format errors", "Cycles"
    ));
    for (relation, breakdown) in &stats.per_relation {
        out.push_str(&format!(
            "{:<18} {:>14} {:>8}\n",
            relation, breakdown.format_error_documents, breakdown.cycle_documents
        ));
    }
    out
}

/// Agreement scores for the event and relation stages.
pub fn agreement_table(events: &AgreementScore, relations: &AgreementScore) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} {:>10} {:>10} {:>10}\n",
        "Stage", "Precision", "Recall", "F1"
    ));
    out.push_str(&format!(
        "{:<12} {:>10.3} {:>10.3} {:>10.3}\n",
        "events", events.precision, events.recall, events.f1
    ));
    out.push_str(&format!(
        "{:<12} {:>10.3} {:>10.3} {:>10.3}\n",
        "relations", relations.precision, relations.recall, relations.f1
    ));
    out
}
