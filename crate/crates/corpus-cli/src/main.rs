use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use corpus_cli::commands::{
    self, AgreementArgs, EvalArgs, GenerateArgs, SaliencyArgs, StatsArgs,
};
use corpus_cli::{CliOverrides, RunConfig};
use serde_json::json;

/// Salient event relation graph toolkit: generate graphs from a document
/// corpus with a cascading prompting pipeline, evaluate them with
/// Hungarian graph similarity, and report saliency, agreement, and
/// format statistics.
#[derive(Parser)]
#[command(name = "evgraph", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Chat-completion endpoint URL (overrides config and environment).
    #[arg(long, global = true)]
    endpoint: Option<String>,

    /// Model name sent to the provider.
    #[arg(long, global = true)]
    model: Option<String>,

    /// Concurrent documents during generation and evaluation.
    #[arg(long, global = true)]
    parallelism: Option<usize>,

    /// Refinement rounds per relation graph.
    #[arg(long, global = true)]
    max_rounds: Option<usize>,

    /// Directory of prompt template overrides.
    #[arg(long, global = true)]
    templates_dir: Option<PathBuf>,

    /// Response cache directory (enables resumable runs).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the generation pipeline over a JSON-lines corpus.
    Generate {
        /// Corpus file, one {"id", "title", "body"} object per line.
        #[arg(long)]
        corpus: PathBuf,
        /// Output directory for canonical bundle JSON files.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Manifest file recording per-document status.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Also write a per-document trace JSON-lines file.
        #[arg(long)]
        trace: bool,
        /// Render all round-1 prompts to files without provider calls.
        #[arg(long)]
        dry_run: bool,
        /// Repeat the whole run N times with per-run caches.
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// Restrict generation to a relation subset
        /// (hierarchical | temporal | causal); repeatable.
        #[arg(long = "relation")]
        relations: Vec<String>,
        /// File of document ids to keep (one per line).
        #[arg(long)]
        id_list: Option<PathBuf>,
    },
    /// Score predicted bundles against gold bundles.
    EvalHgs {
        /// Directory of gold bundle JSON files.
        #[arg(long)]
        gold: PathBuf,
        /// Directory of predicted bundle JSON files.
        #[arg(long)]
        pred: PathBuf,
        /// Write the full JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Compare raw edge sets instead of transitive closures.
        #[arg(long)]
        no_closure: bool,
    },
    /// Compute saliency features for generated events.
    Saliency {
        #[arg(long)]
        corpus: PathBuf,
        /// Directory of bundle JSON files supplying each document's events.
        #[arg(long)]
        bundles: PathBuf,
        /// Mention detection method: exact | llm.
        #[arg(long, default_value = "exact")]
        method: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Format-error and cycle statistics from a trace file.
    Stats {
        /// Trace JSON-lines file written by `generate --trace`.
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Inter-annotation agreement between two annotation files.
    Agreement {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Validate bundle files against the schema and DAG invariants.
    Validate {
        /// Bundle JSON files or directories of them.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("{}", json!({ "error": { "message": format!("{error:#}") } }));
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let overrides = CliOverrides {
        endpoint: cli.endpoint.clone(),
        model: cli.model.clone(),
        parallelism: cli.parallelism,
        max_rounds: cli.max_rounds,
        templates_dir: cli.templates_dir.clone(),
        cache_dir: cli.cache_dir.clone(),
    };
    let config = RunConfig::load(cli.config.as_ref(), &overrides)?;

    match cli.command {
        Command::Generate {
            corpus,
            out_dir,
            manifest,
            trace,
            dry_run,
            runs,
            relations,
            id_list,
        } => {
            let args = GenerateArgs {
                corpus,
                out_dir,
                manifest,
                trace,
                dry_run,
                runs,
                relations: commands::parse_relations(&relations)?,
                id_list,
            };
            let summary = commands::generate(&config, &args)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::EvalHgs {
            gold,
            pred,
            report,
            no_closure,
        } => {
            let output = commands::eval_hgs(
                &config,
                &EvalArgs {
                    gold_dir: gold,
                    pred_dir: pred,
                    report,
                    no_closure,
                },
            )?;
            print!("{}", output.text);
            if !output.missing_pred.is_empty() || !output.missing_gold.is_empty() {
                eprintln!(
                    "{}",
                    json!({
                        "warning": "document id sets differ; evaluated the intersection",
                        "missing_pred": output.missing_pred,
                        "missing_gold": output.missing_gold,
                    })
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Saliency {
            corpus,
            bundles,
            method,
            report,
        } => {
            let output = commands::saliency(
                &config,
                &SaliencyArgs {
                    corpus,
                    bundles_dir: bundles,
                    method,
                    report,
                },
            )?;
            print!("{}", output.text);
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats { trace, report } => {
            let (_, table) = commands::stats(&StatsArgs { trace, report })?;
            print!("{table}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Agreement {
            left,
            right,
            report,
        } => {
            let output = commands::agreement(&AgreementArgs {
                left,
                right,
                report,
            })?;
            print!("{}", output.text);
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { paths } => {
            let (valid, failures) = commands::validate(&paths)?;
            println!("{valid} valid bundle(s)");
            if failures.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("{}", serde_json::to_string(&json!({ "error": {
                    "message": format!("{} invalid bundle(s)", failures.len()),
                    "failures": failures,
                }}))?);
                Ok(ExitCode::from(1))
            }
        }
    }
}
