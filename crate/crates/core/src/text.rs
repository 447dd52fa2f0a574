//! Lower-case word tokenization shared by the classifier and shift analysis.

use std::fmt;

use serde::{Serialize, Serializer};

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\'' || c == '-'
}

/// Splits text into lower-case word tokens. Apostrophes and hyphens are kept
/// inside words (`that's`, `uh-huh`) and stripped at word edges; every other
/// non-alphanumeric character separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.replace(['\u{2019}', '\u{2018}'], "'")
        .split(|c: char| !is_word_char(c))
        .map(|t| t.trim_matches(|c| c == '\'' || c == '-'))
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// A normalized token sequence such as `well actually`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Phrase(Vec<String>);

impl Phrase {
    /// Normalizes free text into a phrase; `None` if it has no word tokens.
    pub fn parse(text: &str) -> Option<Phrase> {
        let tokens = tokenize(text);
        (!tokens.is_empty()).then_some(Phrase(tokens))
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True if `tokens[at..]` starts with this phrase.
    pub fn matches_at(&self, tokens: &[String], at: usize) -> bool {
        tokens.len() >= at + self.0.len() && tokens[at..at + self.0.len()] == self.0[..]
    }
}

impl fmt::Display for Phrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

impl Serialize for Phrase {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
