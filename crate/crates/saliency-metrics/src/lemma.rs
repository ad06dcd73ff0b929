/// Token lemmatization, pluggable so a real lemmatizer can replace the
/// fallback without touching the matching code.
pub trait Lemmatizer: Send + Sync {
    fn lemma(&self, token: &str) -> String;
}

/// Fallback lemmatizer: lowercase plus naive suffix stripping
/// (ing / ed / es / s). Deliberately dependency-free; it only needs to be
/// deterministic and produce stable token streams for substring matching.
#[derive(Debug, Clone, Copy, Default)]
pub struct NaiveLemmatizer;

impl Lemmatizer for NaiveLemmatizer {
    fn lemma(&self, token: &str) -> String {
        let lower = token.to_lowercase();
        if let Some(stem) = lower.strip_suffix("ing") {
            if stem.len() >= 3 {
                return stem.to_string();
            }
        }
        if let Some(stem) = lower.strip_suffix("ied") {
            if stem.len() >= 2 {
                return format!("{stem}y");
            }
        }
        if let Some(stem) = lower.strip_suffix("ed") {
            if stem.len() >= 2 {
                return stem.to_string();
            }
        }
        if lower.ends_with("sses") || lower.ends_with("xes") || lower.ends_with("zes")
            || lower.ends_with("ches") || lower.ends_with("shes")
        {
            return lower[..lower.len() - 2].to_string();
        }
        if let Some(stem) = lower.strip_suffix('s') {
            if stem.len() >= 3 && !stem.ends_with('s') && !stem.ends_with('u') && !stem.ends_with('i') {
                return stem.to_string();
            }
        }
        lower
    }
}

/// Splits on non-alphanumeric boundaries and lemmatizes every token.
pub(crate) fn lemma_tokens(text: &str, lemmatizer: &dyn Lemmatizer) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| lemmatizer.lemma(t))
        .collect()
}
