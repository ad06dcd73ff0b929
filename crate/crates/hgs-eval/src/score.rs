use event_graph_core::{
    transitive_closure, EventGraphBundle, RelationGraph, RelationType,
};
use llm_gateway::TextEmbedder;
use serde::{Deserialize, Serialize};

use crate::distance::{edge_distance, EventEmbeddings};
use crate::error::HgsError;
use crate::hungarian::hungarian_min_cost;

/// Sentinel cost for the padded cells of the unpadded (rectangular)
/// matching; large enough that real pairs are always preferred.
const RECT_SENTINEL: f64 = 1.0e6;

fn distance_matrix(
    gold: &RelationGraph,
    pred: &RelationGraph,
    embeddings: &EventEmbeddings,
) -> Result<Vec<Vec<f64>>, HgsError> {
    if gold.relation() != pred.relation() {
        return Err(HgsError::RelationMismatch {
            left: gold.relation().to_string(),
            right: pred.relation().to_string(),
        });
    }
    gold.edges()
        .iter()
        .map(|g| {
            pred.edges()
                .iter()
                .map(|p| edge_distance(g, p, embeddings))
                .collect()
        })
        .collect()
}

fn pad_square(matrix: &[Vec<f64>], rows: usize, cols: usize, fill: f64) -> Vec<Vec<f64>> {
    let n = rows.max(cols);
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i < rows && j < cols {
                        matrix[i][j]
                    } else {
                        fill
                    }
                })
                .collect()
        })
        .collect()
}

/// Overall Hungarian graph similarity: pad the gold x pred distance matrix
/// square with cost 1, take the minimum assignment, and return
/// `1 - total_cost / N`. Two empty graphs score 1.0; exactly one empty
/// graph scores 0.0.
pub fn hgs(
    gold: &RelationGraph,
    pred: &RelationGraph,
    embeddings: &EventEmbeddings,
) -> Result<f64, HgsError> {
    let (g, p) = (gold.edge_count(), pred.edge_count());
    if g == 0 && p == 0 {
        return Ok(1.0);
    }
    if g == 0 || p == 0 {
        return Ok(0.0);
    }
    let matrix = distance_matrix(gold, pred, embeddings)?;
    let padded = pad_square(&matrix, g, p, 1.0);
    let n = padded.len();
    let (_, total) = hungarian_min_cost(&padded)?;
    Ok((1.0 - total / n as f64).clamp(0.0, 1.0))
}

/// One matched gold/pred edge pair with its similarity (`1 - distance`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchedPair {
    pub gold_head: String,
    pub gold_tail: String,
    pub pred_head: String,
    pub pred_tail: String,
    pub similarity: f64,
}

fn rectangular_match(
    gold: &RelationGraph,
    pred: &RelationGraph,
    embeddings: &EventEmbeddings,
) -> Result<(f64, Vec<MatchedPair>), HgsError> {
    let (g, p) = (gold.edge_count(), pred.edge_count());
    if g == 0 || p == 0 {
        return Ok((0.0, Vec::new()));
    }
    let matrix = distance_matrix(gold, pred, embeddings)?;
    let padded = pad_square(&matrix, g, p, RECT_SENTINEL);
    let (assignment, _) = hungarian_min_cost(&padded)?;

    let mut matched_similarity = 0.0;
    let mut pairs = Vec::new();
    for (i, &j) in assignment.iter().enumerate() {
        if i >= g || j >= p {
            continue;
        }
        let similarity = 1.0 - matrix[i][j];
        matched_similarity += similarity;
        let gold_edge = &gold.edges()[i];
        let pred_edge = &pred.edges()[j];
        pairs.push(MatchedPair {
            gold_head: gold_edge.head().text().to_string(),
            gold_tail: gold_edge.tail().text().to_string(),
            pred_head: pred_edge.head().text().to_string(),
            pred_tail: pred_edge.tail().text().to_string(),
            similarity,
        });
    }
    Ok((matched_similarity, pairs))
}

/// Precision- and recall-oriented scores: the unpadded matching's total
/// matched similarity divided by the predicted / gold edge counts. Both
/// graphs empty scores (1, 1); a zero denominator scores 0.
pub fn phgs_rhgs(
    gold: &RelationGraph,
    pred: &RelationGraph,
    embeddings: &EventEmbeddings,
) -> Result<(f64, f64), HgsError> {
    let (g, p) = (gold.edge_count(), pred.edge_count());
    if g == 0 && p == 0 {
        return Ok((1.0, 1.0));
    }
    if g == 0 || p == 0 {
        return Ok((0.0, 0.0));
    }
    let (matched_similarity, _) = rectangular_match(gold, pred, embeddings)?;
    Ok((
        (matched_similarity / p as f64).clamp(0.0, 1.0),
        (matched_similarity / g as f64).clamp(0.0, 1.0),
    ))
}

/// Scores for one relation type of one document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationReport {
    pub relation: RelationType,
    pub gold_edges: usize,
    pub pred_edges: usize,
    pub hgs: f64,
    pub phgs: f64,
    pub rhgs: f64,
    pub matched: Vec<MatchedPair>,
}

/// Evaluates one relation pair, optionally on transitive closures.
pub fn evaluate_pair(
    gold: &RelationGraph,
    pred: &RelationGraph,
    embeddings: &EventEmbeddings,
    use_closure: bool,
) -> Result<RelationReport, HgsError> {
    let (gold_eval, pred_eval) = if use_closure {
        (transitive_closure(gold), transitive_closure(pred))
    } else {
        (gold.clone(), pred.clone())
    };
    let hgs_score = hgs(&gold_eval, &pred_eval, embeddings)?;
    let (phgs_score, rhgs_score) = phgs_rhgs(&gold_eval, &pred_eval, embeddings)?;
    let (_, matched) = rectangular_match(&gold_eval, &pred_eval, embeddings)?;
    Ok(RelationReport {
        relation: gold.relation(),
        gold_edges: gold_eval.edge_count(),
        pred_edges: pred_eval.edge_count(),
        hgs: hgs_score,
        phgs: phgs_score,
        rhgs: rhgs_score,
        matched,
    })
}

/// Per-document report across the three relation types.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleReport {
    pub document_id: String,
    pub relations: Vec<RelationReport>,
}

/// Evaluates a gold/predicted bundle pair. Embeddings are computed once
/// for the union of both event sets.
pub fn evaluate_bundles(
    gold: &EventGraphBundle,
    pred: &EventGraphBundle,
    embedder: &dyn TextEmbedder,
    use_closure: bool,
) -> Result<BundleReport, HgsError> {
    let embeddings =
        EventEmbeddings::build(gold.events().iter().chain(pred.events().iter()), embedder)?;
    let relations = RelationType::ALL
        .iter()
        .map(|&relation| {
            evaluate_pair(
                gold.graph(relation),
                pred.graph(relation),
                &embeddings,
                use_closure,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BundleReport {
        document_id: gold.document_id().to_string(),
        relations,
    })
}

/// Corpus-level weighted scores for one relation type. Weights are gold
/// edge counts, so documents with no gold edges contribute nothing and
/// are listed separately; with zero total weight the scores are absent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusRelationScores {
    pub relation: RelationType,
    pub total_gold_edges: usize,
    pub weighted_documents: usize,
    pub zero_gold_documents: Vec<String>,
    pub hgs: Option<f64>,
    pub phgs: Option<f64>,
    pub rhgs: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusHgsReport {
    pub documents: Vec<BundleReport>,
    pub per_relation: Vec<CorpusRelationScores>,
    pub use_closure: bool,
}

/// Evaluates a corpus of (gold, predicted) bundle pairs and weights each
/// document's scores by its gold edge count, per relation type.
pub fn corpus_hgs(
    pairs: &[(EventGraphBundle, EventGraphBundle)],
    embedder: &dyn TextEmbedder,
    use_closure: bool,
) -> Result<CorpusHgsReport, HgsError> {
    let events = pairs
        .iter()
        .flat_map(|(gold, pred)| gold.events().iter().chain(pred.events().iter()));
    let embeddings = EventEmbeddings::build(events, embedder)?;

    let mut documents = Vec::with_capacity(pairs.len());
    for (gold, pred) in pairs {
        let relations = RelationType::ALL
            .iter()
            .map(|&relation| {
                evaluate_pair(
                    gold.graph(relation),
                    pred.graph(relation),
                    &embeddings,
                    use_closure,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        documents.push(BundleReport {
            document_id: gold.document_id().to_string(),
            relations,
        });
    }

    let per_relation = RelationType::ALL
        .iter()
        .enumerate()
        .map(|(slot, &relation)| {
            let mut weight_sum = 0.0;
            let mut hgs_sum = 0.0;
            let mut phgs_sum = 0.0;
            let mut rhgs_sum = 0.0;
            let mut weighted_documents = 0;
            let mut zero_gold_documents = Vec::new();
            for report in &documents {
                let rel = &report.relations[slot];
                let weight = rel.gold_edges as f64;
                if weight == 0.0 {
                    zero_gold_documents.push(report.document_id.clone());
                    continue;
                }
                weighted_documents += 1;
                weight_sum += weight;
                hgs_sum += rel.hgs * weight;
                phgs_sum += rel.phgs * weight;
                rhgs_sum += rel.rhgs * weight;
            }
            let score = |sum: f64| {
                if weight_sum > 0.0 {
                    Some(sum / weight_sum)
                } else {
                    None
                }
            };
            CorpusRelationScores {
                relation,
                total_gold_edges: weight_sum as usize,
                weighted_documents,
                zero_gold_documents,
                hgs: score(hgs_sum),
                phgs: score(phgs_sum),
                rhgs: score(rhgs_sum),
            }
        })
        .collect();

    Ok(CorpusHgsReport {
        documents,
        per_relation,
        use_closure,
    })
}
