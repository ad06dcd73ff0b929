//! Hungarian graph similarity and agreement metrics.
//!
//! Predicted and gold relation graphs are compared by embedding their edge
//! endpoints, building a pairwise edge-distance matrix (the maximum of the
//! head-pair and tail-pair cosine distances, clamped to [0, 1]), and
//! solving a minimum-cost assignment over it:
//!
//! * [`hgs`] pads the matrix square with cost 1 and returns
//!   `1 - total_cost / N` (N the padded size);
//! * [`phgs_rhgs`] matches without padding and divides the total matched
//!   similarity by the predicted / gold edge counts respectively;
//! * [`corpus_hgs`] weights per-document scores by gold edge counts.
//!
//! [`set_agreement`] provides the exact-match precision/recall/F1 used for
//! inter-annotator comparison.

mod agreement;
mod distance;
mod error;
mod hungarian;
mod score;

pub use agreement::{set_agreement, AgreementScore};
pub use distance::{edge_distance, EventEmbeddings};
pub use error::HgsError;
pub use hungarian::hungarian_min_cost;
pub use score::{
    corpus_hgs, evaluate_bundles, evaluate_pair, hgs, phgs_rhgs, BundleReport, CorpusHgsReport,
    CorpusRelationScores, MatchedPair, RelationReport,
};
