//! Score-level properties over random graphs and the synthetic embedder:
//! identity, bounds, the phgs = rhgs equality on equal edge counts, and
//! recall monotonicity.

use event_graph_core::{Event, RelationEdge, RelationGraph, RelationType};
use hgs_eval::{edge_distance, hgs, phgs_rhgs, EventEmbeddings};
use llm_gateway::SyntheticEmbedder;
use proptest::prelude::*;

const REL: RelationType = RelationType::Causal;

fn ev(i: usize) -> Event {
    Event::new(&format!("node {i} text")).unwrap()
}

fn graph_from(pairs: &[(usize, usize)], n: usize) -> RelationGraph {
    let nodes: Vec<Event> = (0..n).map(ev).collect();
    let edges: Vec<RelationEdge> = pairs
        .iter()
        .map(|&(h, t)| RelationEdge::new(ev(h), ev(t), REL).unwrap())
        .collect();
    RelationGraph::new(REL, nodes, edges).unwrap()
}

fn arb_dag_pairs(n: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
    let all: Vec<(usize, usize)> = (0..n)
        .flat_map(|h| (h + 1..n).map(move |t| (h, t)))
        .collect();
    let len = all.len();
    proptest::sample::subsequence(all, 0..=len)
}

fn embeddings(n: usize) -> EventEmbeddings {
    let events: Vec<Event> = (0..n).map(ev).collect();
    EventEmbeddings::build(events.iter(), &SyntheticEmbedder::new()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn identity_and_bounds(pairs in arb_dag_pairs(6), other in arb_dag_pairs(6)) {
        let emb = embeddings(6);
        let gold = graph_from(&pairs, 6);
        let pred = graph_from(&other, 6);

        prop_assert!((hgs(&gold, &gold, &emb).unwrap() - 1.0).abs() < 1e-9);

        let score = hgs(&gold, &pred, &emb).unwrap();
        prop_assert!((0.0..=1.0).contains(&score));
        let (p, r) = phgs_rhgs(&gold, &pred, &emb).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!((0.0..=1.0).contains(&r));

        if gold.edge_count() == pred.edge_count() {
            prop_assert!((p - r).abs() < 1e-9, "phgs {p} != rhgs {r} at equal sizes");
        }
    }

    #[test]
    fn edge_order_does_not_change_scores(pairs in arb_dag_pairs(6), other in arb_dag_pairs(6)) {
        let emb = embeddings(6);
        let gold = graph_from(&pairs, 6);
        let pred = graph_from(&other, 6);
        let mut reversed = other.clone();
        reversed.reverse();
        let pred_reversed = graph_from(&reversed, 6);

        let a = hgs(&gold, &pred, &emb).unwrap();
        let b = hgs(&gold, &pred_reversed, &emb).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    // Oracle for the unpadded matching: enumerate every injection of the
    // smaller edge set into the larger one and take the best total
    // similarity; phgs / rhgs must divide that total by |pred| / |gold|.
    #[test]
    fn rectangular_matching_equals_injection_enumeration(
        gold_pairs in arb_dag_pairs(5).prop_filter("1-6 gold edges", |p| (1..=6).contains(&p.len())),
        pred_pairs in arb_dag_pairs(5).prop_filter("1-6 pred edges", |p| (1..=6).contains(&p.len())),
    ) {
        let emb = embeddings(5);
        let gold = graph_from(&gold_pairs, 5);
        let pred = graph_from(&pred_pairs, 5);

        // similarity[i][j] with the smaller set as rows, so every row is
        // matched in every enumerated injection.
        let (g, p) = (gold.edge_count(), pred.edge_count());
        let similarity: Vec<Vec<f64>> = if g <= p {
            gold.edges()
                .iter()
                .map(|a| {
                    pred.edges()
                        .iter()
                        .map(|b| 1.0 - edge_distance(a, b, &emb).unwrap())
                        .collect()
                })
                .collect()
        } else {
            pred.edges()
                .iter()
                .map(|a| {
                    gold.edges()
                        .iter()
                        .map(|b| 1.0 - edge_distance(b, a, &emb).unwrap())
                        .collect()
                })
                .collect()
        };

        fn best_injection(similarity: &[Vec<f64>], row: usize, used: &mut [bool], acc: f64) -> f64 {
            if row == similarity.len() {
                return acc;
            }
            let mut best = f64::NEG_INFINITY;
            for col in 0..used.len() {
                if !used[col] {
                    used[col] = true;
                    let total =
                        best_injection(similarity, row + 1, used, acc + similarity[row][col]);
                    used[col] = false;
                    best = best.max(total);
                }
            }
            best
        }

        let larger = g.max(p);
        let oracle = best_injection(&similarity, 0, &mut vec![false; larger], 0.0);
        let (phgs, rhgs) = phgs_rhgs(&gold, &pred, &emb).unwrap();
        prop_assert!((phgs - oracle / p as f64).abs() < 1e-9, "phgs {phgs} vs oracle {}", oracle / p as f64);
        prop_assert!((rhgs - oracle / g as f64).abs() < 1e-9, "rhgs {rhgs} vs oracle {}", oracle / g as f64);
    }

    #[test]
    fn adding_an_exact_match_never_lowers_rhgs(
        pairs in arb_dag_pairs(6).prop_filter("need gold edges", |p| !p.is_empty()),
        subset_seed in 0usize..64,
    ) {
        let emb = embeddings(6);
        let gold = graph_from(&pairs, 6);

        // Prediction: a subset of gold edges, then grow it by one more
        // exact gold edge.
        let take = subset_seed % pairs.len();
        let pred_small = graph_from(&pairs[..take], 6);
        let pred_larger = graph_from(&pairs[..take + 1], 6);

        let (_, r_small) = phgs_rhgs(&gold, &pred_small, &emb).unwrap();
        let (_, r_large) = phgs_rhgs(&gold, &pred_larger, &emb).unwrap();
        prop_assert!(r_large + 1e-9 >= r_small, "rhgs fell from {r_small} to {r_large}");
    }
}
