//! Corpus-level behavior: bounded parallel runs, per-document error
//! isolation, manifest-based resumability, and byte-level determinism of
//! the canonical bundle output.

use cascade_pipeline::scripting::{DocumentScript, RelationPlan};
use cascade_pipeline::{run_corpus, CorpusRunConfig, ManifestEntry, PipelineConfig, PipelineContext};
use event_graph_core::{DocumentRecord, RelationType};
use llm_gateway::ScriptedProvider;
use prompt_codegen::TemplateSet;
use std::path::Path;

fn document(i: usize) -> DocumentRecord {
    DocumentRecord::new(
        format!("doc-{i}"),
        format!("Title {i}"),
        format!("Document number {i} body. Something happened in town {i}. People reacted."),
    )
}

fn scripted_corpus(n: usize, skip_fixtures_for: Option<usize>) -> ScriptedProvider {
    let templates = TemplateSet::builtin();
    let mut provider = ScriptedProvider::new();
    for i in 0..n {
        if skip_fixtures_for == Some(i) {
            continue;
        }
        let round1 = format!(
            "hierarchical_graph = nx.DiGraph()\nhierarchical_graph.add_edge(\"event one {i}\", \"event two {i}\")"
        );
        let round2 = "hierarchical_graph = nx.DiGraph()".to_string();
        let script = DocumentScript::new(
            document(i),
            format!("Summary of document {i}."),
            format!("1. (event; one {i})\n2. (event; two {i})\n"),
        )
        .with_plan(RelationPlan::new(RelationType::Hierarchical, vec![round1, round2]));
        script.register(&mut provider, &templates).unwrap();
    }
    provider
}

fn read_manifest(path: &Path) -> Vec<ManifestEntry> {
    std::fs::read_to_string(path)
        .unwrap_or_default()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn three_documents_two_workers_all_complete() {
    let provider = scripted_corpus(3, None);
    let templates = TemplateSet::builtin();
    let config = PipelineConfig::default().without_length_filter();
    let ctx = PipelineContext {
        generator: &provider,
        templates: &templates,
        config: &config,
    };

    let dir = tempfile::tempdir().unwrap();
    let run = CorpusRunConfig {
        bundles_dir: dir.path().join("bundles"),
        manifest_path: dir.path().join("manifest.jsonl"),
        trace_path: Some(dir.path().join("trace.jsonl")),
        parallelism: 2,
    };
    let docs: Vec<_> = (0..3).map(document).collect();
    let outcome = run_corpus(&ctx, &docs, &run).unwrap();

    assert_eq!(outcome.completed.len(), 3);
    assert!(outcome.failed.is_empty());
    let manifest = read_manifest(&run.manifest_path);
    assert_eq!(manifest.len(), 3);
    assert!(manifest.iter().all(|e| e.status == "success"));
    for entry in &manifest {
        let rounds = entry.rounds_used.as_ref().unwrap();
        assert_eq!(rounds["is_subevent_of"], 2);
        assert_eq!(rounds["happened_before"], 1);
        assert_eq!(rounds["caused_by"], 1);
    }
    assert_eq!(
        std::fs::read_dir(&run.bundles_dir).unwrap().count(),
        3
    );
    // One trace line per document.
    let trace_lines = std::fs::read_to_string(run.trace_path.as_ref().unwrap()).unwrap();
    assert_eq!(trace_lines.lines().count(), 3);
}

#[test]
fn missing_fixture_isolates_one_document() {
    let provider = scripted_corpus(3, Some(1));
    let templates = TemplateSet::builtin();
    let config = PipelineConfig::default().without_length_filter();
    let ctx = PipelineContext {
        generator: &provider,
        templates: &templates,
        config: &config,
    };

    let dir = tempfile::tempdir().unwrap();
    let run = CorpusRunConfig {
        bundles_dir: dir.path().join("bundles"),
        manifest_path: dir.path().join("manifest.jsonl"),
        trace_path: None,
        parallelism: 2,
    };
    let docs: Vec<_> = (0..3).map(document).collect();
    let outcome = run_corpus(&ctx, &docs, &run).unwrap();

    assert_eq!(outcome.completed.len(), 2);
    assert_eq!(outcome.failed.len(), 1);
    assert_eq!(outcome.failed[0].0, "doc-1");
    assert!(outcome.failed[0].1.contains("fixture missing"));

    let manifest = read_manifest(&run.manifest_path);
    let errors: Vec<_> = manifest.iter().filter(|e| e.status == "error").collect();
    assert_eq!(errors.len(), 1);
    assert_eq!(errors[0].id, "doc-1");
    assert!(errors[0].error.as_ref().unwrap().contains("fixture missing"));
}

#[test]
fn rerun_skips_documents_already_in_manifest() {
    let provider = scripted_corpus(3, None);
    let templates = TemplateSet::builtin();
    let config = PipelineConfig::default().without_length_filter();
    let ctx = PipelineContext {
        generator: &provider,
        templates: &templates,
        config: &config,
    };

    let dir = tempfile::tempdir().unwrap();
    let run = CorpusRunConfig {
        bundles_dir: dir.path().join("bundles"),
        manifest_path: dir.path().join("manifest.jsonl"),
        trace_path: None,
        parallelism: 1,
    };

    // First pass: only the first two documents.
    let docs: Vec<_> = (0..3).map(document).collect();
    let outcome = run_corpus(&ctx, &docs[..2], &run).unwrap();
    assert_eq!(outcome.completed.len(), 2);
    let calls_after_first = provider.call_count();

    // Second pass over all three: the completed two are skipped without
    // any provider traffic; only doc-2 runs.
    let outcome = run_corpus(&ctx, &docs, &run).unwrap();
    assert_eq!(outcome.skipped.len(), 2);
    assert_eq!(outcome.completed, vec!["doc-2".to_string()]);
    let calls_for_third = provider.call_count() - calls_after_first;
    // doc-2 needs: 1 summary + 1 events + 2 hier rounds + 1 grader +
    // 1 temporal + 1 causal = 7 completions.
    assert_eq!(calls_for_third, 7);

    let manifest = read_manifest(&run.manifest_path);
    assert_eq!(manifest.len(), 3);
}

#[test]
fn consecutive_runs_emit_byte_identical_bundles() {
    let provider = scripted_corpus(2, None);
    let templates = TemplateSet::builtin();
    let config = PipelineConfig::default().without_length_filter();
    let ctx = PipelineContext {
        generator: &provider,
        templates: &templates,
        config: &config,
    };
    let docs: Vec<_> = (0..2).map(document).collect();

    let mut outputs: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let run = CorpusRunConfig {
            bundles_dir: dir.path().join("bundles"),
            manifest_path: dir.path().join("manifest.jsonl"),
            trace_path: None,
            parallelism: 2,
        };
        run_corpus(&ctx, &docs, &run).unwrap();
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&run.bundles_dir)
            .unwrap()
            .map(|entry| {
                let entry = entry.unwrap();
                (
                    entry.file_name().to_string_lossy().to_string(),
                    std::fs::read(entry.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0].len(), 2);
}
