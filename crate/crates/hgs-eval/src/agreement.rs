use std::collections::HashSet;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

/// Exact-match agreement between two annotation sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision `|S1 ∩ S2| / |S1|`, recall `|S1 ∩ S2| / |S2|`, and
/// F1 `2 |S1 ∩ S2| / (|S1| + |S2|)`. Two empty sets agree perfectly;
/// otherwise an empty denominator scores 0.
pub fn set_agreement<T: Eq + Hash>(s1: &HashSet<T>, s2: &HashSet<T>) -> AgreementScore {
    if s1.is_empty() && s2.is_empty() {
        return AgreementScore {
            precision: 1.0,
            recall: 1.0,
            f1: 1.0,
        };
    }
    let intersection = s1.intersection(s2).count() as f64;
    let precision = if s1.is_empty() {
        0.0
    } else {
        intersection / s1.len() as f64
    };
    let recall = if s2.is_empty() {
        0.0
    } else {
        intersection / s2.len() as f64
    };
    let f1 = 2.0 * intersection / (s1.len() + s2.len()) as f64;
    AgreementScore {
        precision,
        recall,
        f1,
    }
}
