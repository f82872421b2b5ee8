//! Sentence-similarity scorers over tokenized text.
//!
//! Three deterministic scorers share one tokenizer: BLEU4 (clipped n-gram
//! precision with brevity penalty), ROUGE-L (LCS F-measure) and METEOR-lite
//! (exact + stem unigram alignment with a fragmentation penalty, no synonym
//! resources). All scores are in [0, 1]. The tokenizer is a fixed rule set,
//! not the PTB tokenizer used by some offline toolkits, so absolute values
//! are comparable only within this toolkit.

mod bleu;
mod meteor;
pub mod porter;
mod rouge;

pub use bleu::bleu4;
pub use meteor::meteor_lite;
pub use rouge::rouge_l;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Characters removed before whitespace splitting.
const PUNCTUATION: &[char] = &['.', ',', '!', '?', ';', ':', '"', '\'', '(', ')', '[', ']'];

/// A tokenized sentence: lowercase words, no empty tokens, no whitespace
/// inside tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenSeq {
    tokens: Vec<String>,
}

impl TokenSeq {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Canonical text form: tokens joined by single spaces. Used as the
    /// sentence-equality key for consolidation voting.
    pub fn normalized(&self) -> String {
        self.tokens.join(" ")
    }

    /// Build a sequence from pre-split words, for tests and fixtures.
    pub fn from_words<S: AsRef<str>>(words: &[S]) -> TokenSeq {
        TokenSeq {
            tokens: words
                .iter()
                .map(|w| w.as_ref().to_lowercase())
                .filter(|w| !w.is_empty() && !w.contains(char::is_whitespace))
                .collect(),
        }
    }
}

/// Lowercase, strip punctuation, split on whitespace.
pub fn tokenize(text: &str) -> TokenSeq {
    let stripped: String = text
        .to_lowercase()
        .chars()
        .filter(|c| !PUNCTUATION.contains(c))
        .collect();
    TokenSeq {
        tokens: stripped.split_whitespace().map(str::to_string).collect(),
    }
}

/// The closed set of scorers the live and offline evaluations accept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScorerKind {
    Bleu4,
    RougeL,
    MeteorLite,
}

impl ScorerKind {
    pub const ALL: [ScorerKind; 3] = [ScorerKind::Bleu4, ScorerKind::RougeL, ScorerKind::MeteorLite];

    pub fn name(&self) -> &'static str {
        match self {
            ScorerKind::Bleu4 => "bleu4",
            ScorerKind::RougeL => "rouge-l",
            ScorerKind::MeteorLite => "meteor-lite",
        }
    }
}

impl std::fmt::Display for ScorerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ScorerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_lowercase().replace('_', "-").as_str() {
            "bleu4" | "bleu" => Ok(ScorerKind::Bleu4),
            "rouge-l" | "rougel" | "rouge" => Ok(ScorerKind::RougeL),
            "meteor-lite" | "meteor" => Ok(ScorerKind::MeteorLite),
            other => Err(Error::Config(format!("unknown scorer '{other}'"))),
        }
    }
}

/// Score a candidate against one or more references with the chosen scorer.
pub fn score(kind: ScorerKind, candidate: &TokenSeq, references: &[TokenSeq]) -> f64 {
    match kind {
        ScorerKind::Bleu4 => bleu4(candidate, references),
        ScorerKind::RougeL => rouge_l(candidate, references),
        ScorerKind::MeteorLite => meteor_lite(candidate, references),
    }
}
