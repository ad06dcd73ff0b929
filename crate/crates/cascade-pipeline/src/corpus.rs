use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use event_graph_core::DocumentRecord;
use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::pipeline::{run_document, PipelineContext};
use crate::PipelineError;

/// Output locations and parallelism for a corpus run.
#[derive(Debug, Clone)]
pub struct CorpusRunConfig {
    pub bundles_dir: PathBuf,
    pub manifest_path: PathBuf,
    /// When set, one JSON line of pipeline trace per document.
    pub trace_path: Option<PathBuf>,
    pub parallelism: usize,
}

/// One manifest line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds_used: Option<BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Summary of a corpus run.
#[derive(Debug, Default)]
pub struct CorpusOutcome {
    pub completed: Vec<String>,
    /// Documents skipped because the manifest already records a success
    /// and the bundle file exists.
    pub skipped: Vec<String>,
    pub failed: Vec<(String, String)>,
}

/// File-safe name for a document id; a short content hash disambiguates
/// ids that needed sanitizing.
pub(crate) fn bundle_file_name(id: &str) -> String {
    let sanitized: String = id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if sanitized == id {
        format!("{sanitized}.json")
    } else {
        let mut hash: u64 = 0xcbf29ce484222325;
        for b in id.as_bytes() {
            hash ^= u64::from(*b);
            hash = hash.wrapping_mul(0x100000001b3);
        }
        format!("{sanitized}-{hash:08x}.json")
    }
}

fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>, PipelineError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let reader = BufReader::new(File::open(path)?);
    let mut entries = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: ManifestEntry =
            serde_json::from_str(&line).map_err(|e| PipelineError::Manifest {
                line: idx + 1,
                message: e.to_string(),
            })?;
        entries.push(entry);
    }
    Ok(entries)
}

struct SharedSinks {
    manifest: Mutex<File>,
    trace: Option<Mutex<File>>,
    outcome: Mutex<CorpusOutcome>,
}

impl SharedSinks {
    fn append_manifest(&self, entry: &ManifestEntry) {
        let line = serde_json::to_string(entry).expect("manifest entry serializes");
        let mut file = self.manifest.lock().expect("manifest lock");
        let _ = writeln!(file, "{line}");
        let _ = file.flush();
    }
}

/// Processes documents independently with bounded parallelism.
///
/// Per-document failures are isolated: they land in the manifest and the
/// outcome's `failed` list while the run continues. A rerun skips
/// documents the manifest already marks successful (with their bundle
/// file present), so an interrupted run picks up where it stopped; the
/// gateway response cache makes the repeated prompts free.
pub fn run_corpus(
    ctx: &PipelineContext<'_>,
    documents: &[DocumentRecord],
    run: &CorpusRunConfig,
) -> Result<CorpusOutcome, PipelineError> {
    std::fs::create_dir_all(&run.bundles_dir)?;
    if let Some(parent) = run.manifest_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }

    let mut done: HashSet<String> = HashSet::new();
    for entry in load_manifest(&run.manifest_path)? {
        if entry.status == "success" && run.bundles_dir.join(bundle_file_name(&entry.id)).exists()
        {
            done.insert(entry.id);
        }
    }

    let manifest = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&run.manifest_path)?;
    let trace = match &run.trace_path {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            Some(Mutex::new(
                OpenOptions::new().create(true).append(true).open(path)?,
            ))
        }
        None => None,
    };

    let sinks = SharedSinks {
        manifest: Mutex::new(manifest),
        trace,
        outcome: Mutex::new(CorpusOutcome::default()),
    };
    let next = AtomicUsize::new(0);
    let workers = run.parallelism.max(1).min(documents.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::SeqCst);
                if idx >= documents.len() {
                    break;
                }
                let document = &documents[idx];
                if done.contains(&document.id) {
                    info!("skipping {} (already in manifest)", document.id);
                    sinks
                        .outcome
                        .lock()
                        .expect("outcome lock")
                        .skipped
                        .push(document.id.clone());
                    continue;
                }
                process_one(ctx, document, run, &sinks);
            });
        }
    });

    Ok(sinks.outcome.into_inner().expect("outcome lock"))
}

fn process_one(
    ctx: &PipelineContext<'_>,
    document: &DocumentRecord,
    run: &CorpusRunConfig,
    sinks: &SharedSinks,
) {
    match run_document(ctx, document) {
        Ok((bundle, trace)) => {
            let path = run.bundles_dir.join(bundle_file_name(&document.id));
            let tmp = path.with_extension("json.tmp");
            let write_result = std::fs::write(&tmp, bundle.to_canonical_json())
                .and_then(|_| std::fs::rename(&tmp, &path));
            if let Err(e) = write_result {
                warn!("failed writing bundle for {}: {e}", document.id);
                sinks.append_manifest(&ManifestEntry {
                    id: document.id.clone(),
                    status: "error".to_string(),
                    rounds_used: None,
                    error: Some(format!("bundle write: {e}")),
                });
                sinks
                    .outcome
                    .lock()
                    .expect("outcome lock")
                    .failed
                    .push((document.id.clone(), e.to_string()));
                return;
            }

            let rounds_used: BTreeMap<String, usize> = trace
                .relations
                .iter()
                .map(|rel| (rel.relation.as_str().to_string(), rel.rounds_used()))
                .collect();
            sinks.append_manifest(&ManifestEntry {
                id: document.id.clone(),
                status: "success".to_string(),
                rounds_used: Some(rounds_used),
                error: None,
            });
            if let Some(trace_file) = &sinks.trace {
                let line = serde_json::to_string(&trace).expect("trace serializes");
                let mut file = trace_file.lock().expect("trace lock");
                let _ = writeln!(file, "{line}");
                let _ = file.flush();
            }
            sinks
                .outcome
                .lock()
                .expect("outcome lock")
                .completed
                .push(document.id.clone());
        }
        Err(e) => {
            warn!("document {} failed: {e}", document.id);
            sinks.append_manifest(&ManifestEntry {
                id: document.id.clone(),
                status: "error".to_string(),
                rounds_used: None,
                error: Some(e.to_string()),
            });
            sinks
                .outcome
                .lock()
                .expect("outcome lock")
                .failed
                .push((document.id.clone(), e.to_string()));
        }
    }
}
