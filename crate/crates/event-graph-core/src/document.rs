use serde::{Deserialize, Serialize};

/// One input document: id, title, and raw body text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub id: String,
    #[serde(default)]
    pub title: String,
    pub body: String,
}

impl DocumentRecord {
    pub fn new(id: impl Into<String>, title: impl Into<String>, body: impl Into<String>) -> Self {
        DocumentRecord {
            id: id.into(),
            title: title.into(),
            body: body.into(),
        }
    }

    /// Whitespace-delimited token count of the body.
    pub fn word_count(&self) -> usize {
        self.body.split_whitespace().count()
    }

    /// Sentence segmentation of the body. See [`split_sentences`].
    pub fn sentences(&self) -> Vec<String> {
        split_sentences(&self.body)
    }
}

/// Naive sentence segmentation: paragraph breaks always split, and a run
/// of `.` `!` `?` followed by whitespace ends a sentence. Abbreviations are
/// not special-cased; the segmentation only needs to be deterministic and
/// reasonable for news prose.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    for paragraph in text.split('\n') {
        let mut current = String::new();
        let mut chars = paragraph.chars().peekable();
        while let Some(c) = chars.next() {
            current.push(c);
            if matches!(c, '.' | '!' | '?') {
                // Swallow the rest of the terminator run.
                while let Some(&next) = chars.peek() {
                    if matches!(next, '.' | '!' | '?') {
                        current.push(next);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if chars.peek().is_none_or(|c| c.is_whitespace()) {
                    let trimmed = current.trim();
                    if !trimmed.is_empty() {
                        sentences.push(trimmed.to_string());
                    }
                    current.clear();
                }
            }
        }
        let trimmed = current.trim();
        if !trimmed.is_empty() {
            sentences.push(trimmed.to_string());
        }
    }
    sentences
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_count_is_whitespace_tokens() {
        let doc = DocumentRecord::new("d", "", "one two\tthree\n four ");
        assert_eq!(doc.word_count(), 4);
    }

    #[test]
    fn sentences_split_on_terminators_and_newlines() {
        let doc = DocumentRecord::new(
            "d",
            "",
            "First sentence. Second one! Was it third?\nFourth without terminator",
        );
        assert_eq!(
            doc.sentences(),
            vec![
                "First sentence.",
                "Second one!",
                "Was it third?",
                "Fourth without terminator"
            ]
        );
    }

    #[test]
    fn decimal_points_do_not_split() {
        assert_eq!(
            split_sentences("Taxes fell by 2.5 percent. Support dropped."),
            vec!["Taxes fell by 2.5 percent.", "Support dropped."]
        );
    }

    #[test]
    fn ellipsis_stays_in_one_sentence() {
        assert_eq!(
            split_sentences("It went on... Then it stopped."),
            vec!["It went on...", "Then it stopped."]
        );
    }
}
