use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use cascade_pipeline::{run_corpus, CorpusRunConfig, PipelineContext, PipelineTrace};
use event_graph_core::{
    BundleJson, DocumentRecord, Event, EventGraphBundle, GraphError, RelationEdge, RelationType,
};
use hgs_eval::{corpus_hgs, set_agreement, AgreementScore, CorpusHgsReport};
use log::warn;
use prompt_codegen::{
    render_event_prompt, render_grader_prompt, render_graph_prompt, render_mention_prompts,
    render_summary_prompt, TemplateSet,
};
use saliency_metrics::{
    corpus_saliency, detect_mentions_exact, detect_mentions_llm, CorpusSaliencyReport,
    NaiveLemmatizer, SentenceDoc,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::ingest::{filter_documents, load_corpus, ExcludedDocument};
use crate::providers::{build_embedder, build_generator};
use crate::report;
use crate::stats::{compute_format_stats, FormatStats};

fn load_templates(config: &RunConfig) -> anyhow::Result<TemplateSet> {
    match &config.paths.templates_dir {
        Some(dir) => TemplateSet::from_dir(dir)
            .with_context(|| format!("loading templates from {}", dir.display())),
        None => Ok(TemplateSet::builtin()),
    }
}

fn parse_relation(name: &str) -> anyhow::Result<RelationType> {
    match name {
        "hierarchical" => Ok(RelationType::Hierarchical),
        "temporal" => Ok(RelationType::Temporal),
        "causal" => Ok(RelationType::Causal),
        other => other
            .parse()
            .map_err(|_| anyhow::anyhow!("unknown relation \"{other}\"")),
    }
}

pub fn parse_relations(names: &[String]) -> anyhow::Result<Vec<RelationType>> {
    names.iter().map(|n| parse_relation(n)).collect()
}

// ---------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct GenerateArgs {
    pub corpus: PathBuf,
    pub out_dir: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub trace: bool,
    pub dry_run: bool,
    pub runs: usize,
    pub relations: Vec<RelationType>,
    pub id_list: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub run: usize,
    pub completed: usize,
    pub skipped: usize,
    pub failed: Vec<(String, String)>,
}

#[derive(Debug, Serialize)]
pub struct GenerateSummary {
    pub documents_kept: usize,
    pub documents_excluded: Vec<ExcludedDocument>,
    pub dry_run: bool,
    pub runs: Vec<RunSummary>,
}

pub fn generate(config: &RunConfig, args: &GenerateArgs) -> anyhow::Result<GenerateSummary> {
    if args.runs == 0 {
        bail!("--runs must be at least 1");
    }
    let records = load_corpus(&args.corpus)?;
    let allow_ids: Option<HashSet<String>> = match &args.id_list {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .with_context(|| format!("reading id list {}", path.display()))?
                .lines()
                .map(|l| l.trim().to_string())
                .filter(|l| !l.is_empty())
                .collect(),
        ),
        None => None,
    };
    let (kept, excluded) = filter_documents(
        records,
        config.pipeline.min_words,
        config.pipeline.max_words,
        allow_ids.as_ref(),
    );
    if !excluded.is_empty() {
        warn!("{} document(s) excluded by the length filter", excluded.len());
    }

    let templates = load_templates(config)?;
    let mut pipeline_config = config.pipeline.clone();
    if !args.relations.is_empty() {
        pipeline_config.relations = args.relations.clone();
    }

    let bundles_base = args
        .out_dir
        .clone()
        .unwrap_or_else(|| config.paths.bundles_dir.clone());
    let manifest_base = args.manifest.clone().unwrap_or_else(|| config.paths.manifest.clone());

    if args.dry_run {
        dry_run_prompts(&kept, &templates, &bundles_base)?;
        return Ok(GenerateSummary {
            documents_kept: kept.len(),
            documents_excluded: excluded,
            dry_run: true,
            runs: Vec::new(),
        });
    }

    let mut runs = Vec::new();
    for run_idx in 1..=args.runs {
        // Each run gets its own cache so sampling variance is observable
        // across runs; a single run resumes from its own cache.
        let mut run_config = config.clone();
        if args.runs > 1 {
            if let Some(cache) = &config.paths.cache_dir {
                run_config.paths.cache_dir = Some(cache.join(format!("run-{run_idx}")));
            }
        }
        let generator = build_generator(&run_config)?;
        let ctx = PipelineContext {
            generator: &*generator,
            templates: &templates,
            config: &pipeline_config,
        };
        let (bundles_dir, manifest_path) = if args.runs > 1 {
            (
                bundles_base.join(format!("run-{run_idx}")),
                manifest_path_for_run(&manifest_base, run_idx),
            )
        } else {
            (bundles_base.clone(), manifest_base.clone())
        };
        let trace_path = if args.trace {
            Some(bundles_dir.join("trace.jsonl"))
        } else {
            config.paths.trace.clone()
        };
        let corpus_run = CorpusRunConfig {
            bundles_dir,
            manifest_path,
            trace_path,
            parallelism: config.parallelism,
        };
        let outcome = run_corpus(&ctx, &kept, &corpus_run)?;
        runs.push(RunSummary {
            run: run_idx,
            completed: outcome.completed.len(),
            skipped: outcome.skipped.len(),
            failed: outcome.failed,
        });
    }

    Ok(GenerateSummary {
        documents_kept: kept.len(),
        documents_excluded: excluded,
        dry_run: false,
        runs,
    })
}

fn manifest_path_for_run(base: &Path, run_idx: usize) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "manifest".to_string());
    let ext = base
        .extension()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "jsonl".to_string());
    base.with_file_name(format!("{stem}-run-{run_idx}.{ext}"))
}

/// Renders every round-1 prompt to files without touching any provider.
/// Stages that need model output (events, graphs, grader, mentions) use
/// clearly marked placeholder values.
fn dry_run_prompts(
    documents: &[DocumentRecord],
    templates: &TemplateSet,
    out_dir: &Path,
) -> anyhow::Result<()> {
    let placeholder_events = vec![
        Event::new("placeholder event one").expect("static event"),
        Event::new("placeholder event two").expect("static event"),
    ];
    for document in documents {
        let dir = out_dir.join("prompts").join(sanitize(&document.id));
        std::fs::create_dir_all(&dir)?;
        std::fs::write(
            dir.join("summary.txt"),
            render_summary_prompt(templates, document)?,
        )?;
        std::fs::write(
            dir.join("events.txt"),
            render_event_prompt(templates, "[summary placeholder: generated at run time]")?,
        )?;

        let hier = event_graph_core::RelationGraph::empty(
            RelationType::Hierarchical,
            placeholder_events.iter().cloned(),
        );
        let temp = event_graph_core::RelationGraph::empty(
            RelationType::Temporal,
            placeholder_events.iter().cloned(),
        );
        for relation in RelationType::ALL {
            let priors: Vec<&event_graph_core::RelationGraph> = match relation {
                RelationType::Hierarchical => vec![],
                RelationType::Temporal => vec![&hier],
                RelationType::Causal => vec![&hier, &temp],
            };
            let prompt = render_graph_prompt(
                templates,
                document,
                &placeholder_events,
                relation,
                &priors,
                &[],
            )?;
            std::fs::write(dir.join(format!("graph_{}.txt", relation.label())), prompt)?;
        }

        let edge = RelationEdge::new(
            placeholder_events[0].clone(),
            placeholder_events[1].clone(),
            RelationType::Hierarchical,
        )
        .expect("distinct placeholders");
        std::fs::write(
            dir.join("grader.txt"),
            render_grader_prompt(templates, document, &edge)?,
        )?;
        let (mention, _) =
            render_mention_prompts(templates, document, &placeholder_events[0])?;
        std::fs::write(dir.join("mention_initial.txt"), mention)?;
    }
    Ok(())
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

// ---------------------------------------------------------------------
// eval-hgs
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EvalArgs {
    pub gold_dir: PathBuf,
    pub pred_dir: PathBuf,
    pub report: Option<PathBuf>,
    pub no_closure: bool,
}

#[derive(Debug, Serialize)]
pub struct EvalOutput {
    pub report: CorpusHgsReport,
    /// Gold documents with no prediction, and vice versa; the evaluation
    /// runs on the intersection.
    pub missing_pred: Vec<String>,
    pub missing_gold: Vec<String>,
    #[serde(skip)]
    pub text: String,
}

/// Reads every `*.json` bundle in a directory, keyed by document id.
pub fn load_bundles(dir: &Path) -> anyhow::Result<BTreeMap<String, EventGraphBundle>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading bundle dir {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    let mut bundles = BTreeMap::new();
    for path in paths {
        let text = std::fs::read_to_string(&path)?;
        let bundle = EventGraphBundle::from_json(&text)
            .with_context(|| format!("bundle {}", path.display()))?;
        bundles.insert(bundle.document_id().to_string(), bundle);
    }
    Ok(bundles)
}

pub fn eval_hgs(config: &RunConfig, args: &EvalArgs) -> anyhow::Result<EvalOutput> {
    let gold = load_bundles(&args.gold_dir)?;
    let pred = load_bundles(&args.pred_dir)?;

    let missing_pred: Vec<String> = gold.keys().filter(|k| !pred.contains_key(*k)).cloned().collect();
    let missing_gold: Vec<String> = pred.keys().filter(|k| !gold.contains_key(*k)).cloned().collect();
    for id in &missing_pred {
        warn!("document {id} has gold but no prediction; skipping");
    }
    for id in &missing_gold {
        warn!("document {id} has prediction but no gold; skipping");
    }

    let pairs: Vec<(EventGraphBundle, EventGraphBundle)> = gold
        .iter()
        .filter_map(|(id, g)| pred.get(id).map(|p| (g.clone(), p.clone())))
        .collect();
    if pairs.is_empty() {
        bail!("no document ids shared between gold and prediction directories");
    }

    let embedder = build_embedder(config)?;
    let report = corpus_hgs(&pairs, &*embedder, !args.no_closure)?;
    let text = report::hgs_table(&report);

    let output = EvalOutput {
        report,
        missing_pred,
        missing_gold,
        text,
    };
    if let Some(path) = &args.report {
        write_json(path, &serde_json::json!({
            "report": output.report,
            "missing_pred": output.missing_pred,
            "missing_gold": output.missing_gold,
        }))?;
    }
    Ok(output)
}

// ---------------------------------------------------------------------
// saliency
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SaliencyArgs {
    pub corpus: PathBuf,
    pub bundles_dir: PathBuf,
    pub method: String,
    pub report: Option<PathBuf>,
}

pub struct SaliencyOutput {
    pub report: CorpusSaliencyReport,
    pub documents_without_bundles: Vec<String>,
    pub text: String,
}

pub fn saliency(config: &RunConfig, args: &SaliencyArgs) -> anyhow::Result<SaliencyOutput> {
    let records = load_corpus(&args.corpus)?;
    let bundles = load_bundles(&args.bundles_dir)?;
    let lemmatizer = NaiveLemmatizer;

    let mut entries: Vec<(SentenceDoc, Vec<Event>)> = Vec::new();
    let mut documents_without_bundles = Vec::new();
    for record in &records {
        match bundles.get(&record.id) {
            Some(bundle) => {
                let doc = SentenceDoc::from_record(record, &lemmatizer)
                    .with_context(|| format!("document {}", record.id))?;
                entries.push((doc, bundle.events().to_vec()));
            }
            None => documents_without_bundles.push(record.id.clone()),
        }
    }
    if !documents_without_bundles.is_empty() {
        warn!(
            "{} corpus document(s) have no bundle and were skipped",
            documents_without_bundles.len()
        );
    }
    if entries.is_empty() {
        bail!("no corpus documents matched a bundle");
    }

    let report = match args.method.as_str() {
        "exact" => corpus_saliency(&entries, |doc, event| {
            Ok(detect_mentions_exact(doc, event, &lemmatizer))
        })?,
        "llm" => {
            let generator = build_generator(config)?;
            let templates = load_templates(config)?;
            let params = config.pipeline.stage_params.clone();
            corpus_saliency(&entries, |doc, event| {
                detect_mentions_llm(doc, event, &*generator, &templates, &params)
            })?
        }
        other => bail!("unknown saliency method \"{other}\" (expected exact or llm)"),
    };

    let text = report::saliency_table(&report);
    if let Some(path) = &args.report {
        write_json(path, &report)?;
    }
    Ok(SaliencyOutput {
        report,
        documents_without_bundles,
        text,
    })
}

// ---------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct StatsArgs {
    pub trace: PathBuf,
    pub report: Option<PathBuf>,
}

pub fn stats(args: &StatsArgs) -> anyhow::Result<(FormatStats, String)> {
    let text = std::fs::read_to_string(&args.trace)
        .with_context(|| format!("reading trace {}", args.trace.display()))?;
    let mut traces = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let trace: PipelineTrace =
            serde_json::from_str(line).with_context(|| format!("trace line {}", idx + 1))?;
        traces.push(trace);
    }
    let stats = compute_format_stats(&traces);
    let table = report::stats_table(&stats);
    if let Some(path) = &args.report {
        write_json(path, &stats)?;
    }
    Ok((stats, table))
}

// ---------------------------------------------------------------------
// agreement
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct AgreementArgs {
    pub left: PathBuf,
    pub right: PathBuf,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct AgreementOutput {
    pub events: AgreementScore,
    pub relations: AgreementScore,
    pub per_relation: BTreeMap<String, AgreementScore>,
    #[serde(skip)]
    pub text: String,
}

type AnnotationSets = (HashSet<Event>, HashSet<(RelationType, Event, Event)>);

fn annotation_sets(path: &Path) -> anyhow::Result<AnnotationSets> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading annotation file {}", path.display()))?;
    let raw: BundleJson = serde_json::from_str(&text)
        .with_context(|| format!("annotation file {}", path.display()))?;
    let mut events = HashSet::new();
    for event in &raw.events {
        events.insert(Event::new(event)?);
    }
    let mut relations = HashSet::new();
    for rel in &raw.relations {
        relations.insert((
            rel.relation.parse::<RelationType>()?,
            Event::new(&rel.head)?,
            Event::new(&rel.tail)?,
        ));
    }
    Ok((events, relations))
}

pub fn agreement(args: &AgreementArgs) -> anyhow::Result<AgreementOutput> {
    let (events_left, relations_left) = annotation_sets(&args.left)?;
    let (events_right, relations_right) = annotation_sets(&args.right)?;

    let events = set_agreement(&events_left, &events_right);
    let relations = set_agreement(&relations_left, &relations_right);
    let mut per_relation = BTreeMap::new();
    for relation in RelationType::ALL {
        let left: HashSet<_> = relations_left
            .iter()
            .filter(|(r, _, _)| *r == relation)
            .cloned()
            .collect();
        let right: HashSet<_> = relations_right
            .iter()
            .filter(|(r, _, _)| *r == relation)
            .cloned()
            .collect();
        per_relation.insert(relation.as_str().to_string(), set_agreement(&left, &right));
    }

    let text = report::agreement_table(&events, &relations);
    let output = AgreementOutput {
        events,
        relations,
        per_relation,
        text,
    };
    if let Some(path) = &args.report {
        write_json(path, &output)?;
    }
    Ok(output)
}

// ---------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct ValidationFailure {
    pub path: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<Vec<String>>,
}

/// Validates bundle files (or directories of them) against the schema and
/// DAG invariants. Returns the count of valid bundles plus one failure
/// record per invalid file, naming the cycle when that is the violation.
pub fn validate(paths: &[PathBuf]) -> anyhow::Result<(usize, Vec<ValidationFailure>)> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut children: Vec<PathBuf> = std::fs::read_dir(path)?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "json"))
                .collect();
            children.sort();
            files.extend(children);
        } else {
            files.push(path.clone());
        }
    }

    let mut valid = 0usize;
    let mut failures = Vec::new();
    for file in files {
        match std::fs::read_to_string(&file) {
            Ok(text) => match EventGraphBundle::from_json(&text) {
                Ok(_) => valid += 1,
                Err(error) => {
                    let cycle = match &error {
                        GraphError::CycleDetected { witness } => Some(witness.clone()),
                        _ => None,
                    };
                    failures.push(ValidationFailure {
                        path: file.display().to_string(),
                        message: error.to_string(),
                        cycle,
                    });
                }
            },
            Err(error) => failures.push(ValidationFailure {
                path: file.display().to_string(),
                message: error.to_string(),
                cycle: None,
            }),
        }
    }
    Ok((valid, failures))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing report {}", path.display()))
}
