use crate::error::GatewayError;
use crate::request::EmbeddingVector;
use crate::TextEmbedder;

/// Dimension of the synthetic embedding space.
pub const SYNTHETIC_DIMENSION: usize = 256;

/// Deterministic test embedder: each text becomes an L2-normalized hashed
/// bag-of-words vector. Tokens are the whitespace-split, lowercased words;
/// each token increments the bucket `fnv1a64(token) % dimension`.
///
/// Identical texts give identical vectors, and texts over disjoint,
/// collision-free vocabularies give orthogonal vectors.
#[derive(Debug, Clone)]
pub struct SyntheticEmbedder {
    dimension: usize,
}

impl SyntheticEmbedder {
    pub fn new() -> Self {
        SyntheticEmbedder {
            dimension: SYNTHETIC_DIMENSION,
        }
    }

    pub fn with_dimension(dimension: usize) -> Self {
        SyntheticEmbedder { dimension }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Bucket index a token hashes to; exposed so tests can verify their
    /// vocabularies are collision-free.
    pub fn bucket(&self, token: &str) -> usize {
        (fnv1a64(token.to_lowercase().as_bytes()) % self.dimension as u64) as usize
    }

    fn embed_one(&self, text: &str) -> Result<EmbeddingVector, GatewayError> {
        let mut values = vec![0.0f64; self.dimension];
        let mut tokens = 0usize;
        for token in text.split_whitespace() {
            values[self.bucket(token)] += 1.0;
            tokens += 1;
        }
        if tokens == 0 {
            return Err(GatewayError::EmptyEmbedInput);
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut values {
            *v /= norm;
        }
        Ok(EmbeddingVector::new(values))
    }
}

impl Default for SyntheticEmbedder {
    fn default() -> Self {
        SyntheticEmbedder::new()
    }
}

impl TextEmbedder for SyntheticEmbedder {
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, GatewayError> {
        if texts.is_empty() {
            return Err(GatewayError::EmptyEmbedInput);
        }
        texts.iter().map(|t| self.embed_one(t)).collect()
    }
}

/// FNV-1a, chosen for stability across platforms and Rust versions.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}
