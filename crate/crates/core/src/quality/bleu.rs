use std::collections::HashMap;
use std::ops::{Add, AddAssign};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subtitle::Utterance;
use crate::text::{tokenize, TokenScheme};

pub const MAX_ORDER: usize = 4;

/// Clipped n-gram matches and totals plus lengths; additive across segments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BleuStats {
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl Add for BleuStats {
    type Output = BleuStats;

    fn add(mut self, rhs: BleuStats) -> BleuStats {
        self += rhs;
        self
    }
}

impl AddAssign for BleuStats {
    fn add_assign(&mut self, rhs: BleuStats) {
        for n in 0..MAX_ORDER {
            self.matches[n] += rhs.matches[n];
            self.totals[n] += rhs.totals[n];
        }
        self.hyp_len += rhs.hyp_len;
        self.ref_len += rhs.ref_len;
    }
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, u64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            let key: Vec<&str> = window.iter().map(AsRef::as_ref).collect();
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    counts
}

impl BleuStats {
    /// Statistics of one segment against a single reference.
    pub fn from_segment<S: AsRef<str>>(hyp: &[S], reference: &[S]) -> Self {
        let mut stats = BleuStats {
            hyp_len: hyp.len() as u64,
            ref_len: reference.len() as u64,
            ..BleuStats::default()
        };
        for n in 1..=MAX_ORDER {
            let h = ngram_counts(hyp, n);
            let r = ngram_counts(reference, n);
            stats.totals[n - 1] = hyp.len().saturating_sub(n - 1) as u64;
            stats.matches[n - 1] = h
                .iter()
                .map(|(gram, &c)| c.min(r.get(gram).copied().unwrap_or(0)))
                .sum();
        }
        stats
    }

    pub fn score(&self) -> BleuScore {
        BleuScore::from_stats(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BleuScore {
    /// 0..=100.
    pub score: f64,
    /// Smoothed n-gram precisions as fractions, orders 1 to 4.
    pub precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hyp_length: u64,
    pub ref_length: u64,
}

impl BleuScore {
    /// Exponential smoothing: the k-th order with zero matches gets precision
    /// `1 / (2^k * total)`. An order with no hypothesis n-grams at all zeroes
    /// the score.
    pub fn from_stats(stats: &BleuStats) -> Self {
        let mut precisions = [0.0; MAX_ORDER];
        let mut smooth = 1.0f64;
        let mut degenerate = false;
        for (n, precision) in precisions.iter_mut().enumerate() {
            let total = stats.totals[n];
            if total == 0 {
                degenerate = true;
                break;
            }
            *precision = if stats.matches[n] == 0 {
                smooth *= 2.0;
                1.0 / (smooth * total as f64)
            } else {
                stats.matches[n] as f64 / total as f64
            };
        }
        let brevity_penalty = if stats.hyp_len == 0 {
            0.0
        } else if stats.hyp_len < stats.ref_len {
            (1.0 - stats.ref_len as f64 / stats.hyp_len as f64).exp()
        } else {
            1.0
        };
        let score = if degenerate || stats.hyp_len == 0 {
            0.0
        } else {
            let log_mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64;
            100.0 * brevity_penalty * log_mean.exp()
        };
        BleuScore {
            score,
            precisions,
            brevity_penalty,
            hyp_length: stats.hyp_len,
            ref_length: stats.ref_len,
        }
    }
}

/// `13a` tokens of the canonical marked form, breaks optionally dropped.
pub fn bleu_tokens(utterance: &Utterance, keep_breaks: bool) -> Vec<String> {
    tokenize(&utterance.marked_text(), TokenScheme::Intl13a)
        .tokens
        .into_iter()
        .filter(|t| keep_breaks || !t.is_break())
        .map(|t| t.surface().to_string())
        .collect()
}

pub fn corpus_bleu_from_tokens<S: AsRef<str>>(hyp: &[Vec<S>], reference: &[Vec<S>]) -> Result<BleuScore> {
    if hyp.len() != reference.len() {
        return Err(Error::CorpusLengthMismatch {
            hyp: hyp.len(),
            reference: reference.len(),
        });
    }
    let mut stats = BleuStats::default();
    for (h, r) in hyp.iter().zip(reference) {
        stats += BleuStats::from_segment(h, r);
    }
    if stats.hyp_len == 0 {
        warn!("hypothesis corpus is empty; BLEU is 0");
    }
    Ok(stats.score())
}

/// Corpus BLEU (4-gram, single reference, mixed case, `13a`), with break
/// symbols scored as ordinary tokens when `keep_breaks` is set.
pub fn corpus_bleu(hyp: &[Utterance], reference: &[Utterance], keep_breaks: bool) -> Result<BleuScore> {
    let h: Vec<_> = hyp.iter().map(|u| bleu_tokens(u, keep_breaks)).collect();
    let r: Vec<_> = reference.iter().map(|u| bleu_tokens(u, keep_breaks)).collect();
    corpus_bleu_from_tokens(&h, &r)
}
