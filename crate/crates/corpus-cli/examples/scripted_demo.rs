//! End-to-end demo on a scripted provider: generates bundles for a tiny
//! corpus, evaluates them against themselves, and prints every report.
//!
//! Run: `cargo run -p corpus-cli --example scripted_demo`
//!
//! Everything is deterministic and offline; the "model" is a fixture set
//! built alongside the corpus. Outputs land in `target/scripted-demo/`.

use cascade_pipeline::scripting::{DocumentScript, RelationPlan};
use corpus_cli::commands::{self, EvalArgs, GenerateArgs, SaliencyArgs, StatsArgs};
use corpus_cli::RunConfig;
use event_graph_core::{DocumentRecord, RelationType};
use llm_gateway::ScriptedProvider;
use prompt_codegen::TemplateSet;
use std::path::PathBuf;

fn main() -> anyhow::Result<()> {
    let out = PathBuf::from("target/scripted-demo");
    let _ = std::fs::remove_dir_all(&out);
    std::fs::create_dir_all(&out)?;

    // --- Script three documents -------------------------------------
    let templates = TemplateSet::builtin();
    let mut provider = ScriptedProvider::new();
    let mut corpus_lines = Vec::new();

    for (i, topic) in ["flood", "election", "merger"].iter().enumerate() {
        let document = DocumentRecord::new(
            format!("demo-{topic}"),
            format!("A story about the {topic}"),
            format!(
                "The {topic} story begins here. Authorities reviewed the {topic} in a public session. \
                 Residents felt the aftermath for weeks. Officials promised a deeper review."
            ),
        );
        corpus_lines.push(serde_json::to_string(&document)?);

        let events_response = format!(
            "1. (the {topic} story; begins)\n2. (authorities; reviewed; the {topic})\n3. (residents; felt; the aftermath)"
        );
        let hier_r1 = format!(
            "hierarchical_graph = nx.DiGraph()\nhierarchical_graph.add_edge(\"authorities reviewed the {topic}\", \"the {topic} story begins\")"
        );
        let temp_r1 = format!(
            "temporal_graph = nx.DiGraph()\ntemporal_graph.add_edge(\"the {topic} story begins\", \"residents felt the aftermath\")"
        );
        let echo = |var: &str| format!("{var} = nx.DiGraph()\n# nothing further");

        DocumentScript::new(document, format!("A summary of the {topic} story."), events_response)
            .with_plan(RelationPlan::new(
                RelationType::Hierarchical,
                vec![hier_r1, echo("hierarchical_graph")],
            ))
            .with_plan(RelationPlan::new(
                RelationType::Temporal,
                vec![temp_r1, echo("temporal_graph")],
            ))
            .register(&mut provider, &templates)?;
        let _ = i;
    }

    let corpus = out.join("corpus.jsonl");
    std::fs::write(&corpus, corpus_lines.join("\n"))?;
    let fixtures = out.join("fixtures.json");
    std::fs::write(&fixtures, serde_json::to_string_pretty(&provider.to_entries())?)?;

    // --- Configure for the scripted provider ------------------------
    let mut config = RunConfig::default();
    config.provider.kind = "scripted".to_string();
    config.provider.scripted_fixtures = Some(fixtures);
    config.paths.cache_dir = Some(out.join("cache"));
    config.pipeline.min_words = 0; // demo documents are tiny
    config.pipeline.max_words = usize::MAX;

    // --- Generate ----------------------------------------------------
    let bundles_dir = out.join("bundles");
    let summary = commands::generate(
        &config,
        &GenerateArgs {
            corpus: corpus.clone(),
            out_dir: Some(bundles_dir.clone()),
            manifest: Some(out.join("manifest.jsonl")),
            trace: true,
            dry_run: false,
            runs: 1,
            relations: vec![],
            id_list: None,
        },
    )?;
    println!("== generate ==");
    println!(
        "completed {} document(s), {} failed\n",
        summary.runs[0].completed,
        summary.runs[0].failed.len()
    );

    // --- Evaluate the bundles against themselves ---------------------
    let eval = commands::eval_hgs(
        &config,
        &EvalArgs {
            gold_dir: bundles_dir.clone(),
            pred_dir: bundles_dir.clone(),
            report: Some(out.join("hgs.json")),
            no_closure: false,
        },
    )?;
    println!("== eval-hgs (self vs self) ==");
    print!("{}", eval.text);
    println!();

    // --- Saliency ------------------------------------------------------
    let saliency = commands::saliency(
        &config,
        &SaliencyArgs {
            corpus: corpus.clone(),
            bundles_dir: bundles_dir.clone(),
            method: "exact".to_string(),
            report: Some(out.join("saliency.json")),
        },
    )?;
    println!("== saliency (exact mentions) ==");
    print!("{}", saliency.text);
    println!();

    // --- Stats ---------------------------------------------------------
    let (_, table) = commands::stats(&StatsArgs {
        trace: bundles_dir.join("trace.jsonl"),
        report: Some(out.join("stats.json")),
    })?;
    println!("== stats ==");
    print!("{table}");

    println!("\nreports written under {}", out.display());
    Ok(())
}
