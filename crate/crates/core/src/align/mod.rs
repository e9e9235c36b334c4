//! Word alignment: EM training with an optional diagonal prior, Viterbi
//! decoding and Pharaoh-format links.

mod model;
mod pharaoh;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subtitle::BreakKind;
use crate::text::TokenizedUtterance;

pub use model::{
    train_aligner, viterbi_align, AlignerConfig, TrainingRun, TranslationModel, MAX_TENSION, MIN_TENSION, NULL_SYMBOL,
    OOV_FLOOR,
};
pub use pharaoh::{parse_pharaoh, parse_pharaoh_file, write_pharaoh, SentenceAlignment};

/// Tokenized sentence pair with break symbols removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitextPair {
    pub source: Vec<String>,
    pub target: Vec<String>,
}

impl BitextPair {
    pub fn new(source: Vec<String>, target: Vec<String>) -> Self {
        BitextPair { source, target }
    }

    /// Word tokens of two tokenized utterances, breaks dropped.
    pub fn from_tokenized(source: &TokenizedUtterance, target: &TokenizedUtterance) -> Self {
        let words = |u: &TokenizedUtterance| u.words().map(|t| t.surface().to_string()).collect();
        BitextPair::new(words(source), words(target))
    }

    /// Same pair with source and target swapped.
    pub fn reversed(&self) -> Self {
        BitextPair::new(self.target.clone(), self.source.clone())
    }

    /// Both sides non-empty and free of break symbols.
    pub fn validate(&self, index: usize) -> Result<()> {
        for (side, words) in [("source", &self.source), ("target", &self.target)] {
            if words.is_empty() {
                return Err(Error::InvalidBitext {
                    index,
                    message: format!("empty {side} side"),
                });
            }
            if let Some(w) = words.iter().find(|w| BreakKind::from_literal(w).is_some()) {
                return Err(Error::InvalidBitext {
                    index,
                    message: format!("{side} side contains break symbol {w}"),
                });
            }
        }
        Ok(())
    }
}

fn split_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter(|w| BreakKind::from_literal(w).is_none())
        .map(String::from)
        .collect()
}

/// Parses `source ||| target` lines of whitespace-tokenized text. Break
/// symbols are dropped; pair indices in errors are 0-based line numbers.
pub fn parse_bitext(input: &str) -> Result<Vec<BitextPair>> {
    input
        .lines()
        .enumerate()
        .map(|(index, line)| {
            let (s, t) = line.split_once("|||").ok_or_else(|| Error::InvalidBitext {
                index,
                message: "missing ||| separator".into(),
            })?;
            let pair = BitextPair::new(split_words(s), split_words(t));
            pair.validate(index)?;
            Ok(pair)
        })
        .collect()
}

/// Pairs up two line-parallel files of whitespace-tokenized text.
pub fn parse_parallel_bitext(source: &str, target: &str) -> Result<Vec<BitextPair>> {
    let (s, t): (Vec<_>, Vec<_>) = (source.lines().collect(), target.lines().collect());
    if s.len() != t.len() {
        return Err(Error::LengthMismatch {
            what: "parallel bitext lines",
            left: s.len(),
            right: t.len(),
        });
    }
    s.into_iter()
        .zip(t)
        .enumerate()
        .map(|(index, (s, t))| {
            let pair = BitextPair::new(split_words(s), split_words(t));
            pair.validate(index)?;
            Ok(pair)
        })
        .collect()
}

/// `source ||| target` line for a pair.
pub fn write_bitext_line(pair: &BitextPair) -> String {
    format!("{} ||| {}", pair.source.join(" "), pair.target.join(" "))
}
