use std::ops::{Add, AddAssign};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subtitle::Utterance;
use crate::text::{normalize_for_wer, tokenize, TokenScheme};

/// Additive edit-operation counts; the sufficient statistic of corpus WER.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCounts {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub reference_length: usize,
}

impl EditCounts {
    pub fn edits(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }

    /// WER in percent. A zero-length reference scores 0 when there are no
    /// edits and infinity otherwise.
    pub fn wer(&self) -> f64 {
        if self.reference_length == 0 {
            return if self.edits() == 0 { 0.0 } else { f64::INFINITY };
        }
        100.0 * self.edits() as f64 / self.reference_length as f64
    }
}

impl Add for EditCounts {
    type Output = EditCounts;

    fn add(mut self, rhs: EditCounts) -> EditCounts {
        self += rhs;
        self
    }
}

impl AddAssign for EditCounts {
    fn add_assign(&mut self, rhs: EditCounts) {
        self.substitutions += rhs.substitutions;
        self.deletions += rhs.deletions;
        self.insertions += rhs.insertions;
        self.reference_length += rhs.reference_length;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WerBreakdown {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub reference_length: usize,
    /// Percentage.
    pub wer: f64,
}

impl From<EditCounts> for WerBreakdown {
    fn from(c: EditCounts) -> Self {
        WerBreakdown {
            substitutions: c.substitutions,
            deletions: c.deletions,
            insertions: c.insertions,
            reference_length: c.reference_length,
            wer: c.wer(),
        }
    }
}

/// Unit-cost Levenshtein alignment of two word sequences. The backtrace
/// prefers the diagonal (match or substitution), then deletion, then
/// insertion.
pub fn edit_counts<S: AsRef<str>>(hyp: &[S], reference: &[S]) -> EditCounts {
    let (n, m) = (reference.len(), hyp.len());
    let width = m + 1;
    let mut dp = vec![0usize; (n + 1) * width];
    for (j, cell) in dp.iter_mut().take(width).enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        dp[i * width] = i;
        for j in 1..=m {
            let sub = dp[(i - 1) * width + j - 1] + usize::from(reference[i - 1].as_ref() != hyp[j - 1].as_ref());
            let del = dp[(i - 1) * width + j] + 1;
            let ins = dp[i * width + j - 1] + 1;
            dp[i * width + j] = sub.min(del).min(ins);
        }
    }

    let mut counts = EditCounts {
        reference_length: n,
        ..EditCounts::default()
    };
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dp[i * width + j];
        if i > 0 && j > 0 {
            let same = reference[i - 1].as_ref() == hyp[j - 1].as_ref();
            if dp[(i - 1) * width + j - 1] + usize::from(!same) == here {
                counts.substitutions += usize::from(!same);
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && dp[(i - 1) * width + j] + 1 == here {
            counts.deletions += 1;
            i -= 1;
        } else {
            counts.insertions += 1;
            j -= 1;
        }
    }
    counts
}

/// Words scored by WER: whitespace tokens, lowercased, punctuation and
/// breaks removed.
pub fn wer_words(utterance: &Utterance) -> Vec<String> {
    normalize_for_wer(&tokenize(&utterance.plain_text(), TokenScheme::Whitespace))
}

/// Corpus WER over already-normalized word sequences.
pub fn wer_from_words<S: AsRef<str>>(hyp: &[Vec<S>], reference: &[Vec<S>]) -> Result<WerBreakdown> {
    if reference.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if hyp.len() != reference.len() {
        return Err(Error::CorpusLengthMismatch {
            hyp: hyp.len(),
            reference: reference.len(),
        });
    }
    let mut total = EditCounts::default();
    for (k, (h, r)) in hyp.iter().zip(reference).enumerate() {
        if r.is_empty() {
            warn!("segment {k}: empty reference after normalization; hypothesis words count as insertions");
        }
        total += edit_counts(h, r);
    }
    if total.reference_length == 0 {
        return Err(Error::EmptyReference);
    }
    Ok(total.into())
}

/// Corpus-level WER on unpunctuated, lowercased text.
pub fn wer(hyp: &[Utterance], reference: &[Utterance]) -> Result<WerBreakdown> {
    let h: Vec<_> = hyp.iter().map(wer_words).collect();
    let r: Vec<_> = reference.iter().map(wer_words).collect();
    wer_from_words(&h, &r)
}
