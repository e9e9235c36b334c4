//! Paired bootstrap resampling over test segments.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::bleu::{bleu_tokens, BleuStats};
use super::wer::{edit_counts, wer_words, EditCounts};
use crate::error::{Error, Result};
use crate::subtitle::Utterance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Bleu,
    Wer,
}

impl Metric {
    pub fn higher_is_better(self) -> bool {
        matches!(self, Metric::Bleu)
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "bleu" => Ok(Metric::Bleu),
            "wer" => Ok(Metric::Wer),
            other => Err(format!("unknown metric {other:?} (expected bleu or wer)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum System {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    /// Fraction of resamples in which the system that is worse on the full
    /// set scores at least as well as the better one. Ties count against
    /// significance.
    pub p_value: f64,
    pub resamples: usize,
    /// Mean of `score(A) - score(B)` over resamples.
    pub delta_mean: f64,
    pub seed: u64,
    /// System with the better score on the full set.
    pub better: System,
}

/// Draws `resamples` index multisets of size `n` with replacement.
///
/// The generator is ChaCha8 seeded from `seed`; draws are taken in resample
/// order, then segment order.
pub fn resample_indices(n: usize, resamples: usize, seed: u64) -> impl Iterator<Item = Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..resamples).map(move |_| (0..n).map(|_| rng.random_range(0..n)).collect())
}

trait SegmentStat: Copy + Default + std::ops::AddAssign {
    fn corpus_score(&self) -> f64;
}

impl SegmentStat for BleuStats {
    fn corpus_score(&self) -> f64 {
        self.score().score
    }
}

impl SegmentStat for EditCounts {
    fn corpus_score(&self) -> f64 {
        self.wer()
    }
}

fn run<T: SegmentStat>(a: &[T], b: &[T], higher_is_better: bool, resamples: usize, seed: u64) -> SignificanceResult {
    let total = |stats: &[T]| {
        let mut acc = T::default();
        for s in stats {
            acc += *s;
        }
        acc.corpus_score()
    };
    // `goodness` maps scores so that larger is always better
    let goodness = |x: f64| if higher_is_better { x } else { -x };
    let a_better = goodness(total(a)) >= goodness(total(b));

    let mut not_worse = 0usize;
    let mut delta_sum = 0.0;
    for sample in resample_indices(a.len(), resamples, seed) {
        let (mut sa, mut sb) = (T::default(), T::default());
        for &i in &sample {
            sa += a[i];
            sb += b[i];
        }
        let (score_a, score_b) = (sa.corpus_score(), sb.corpus_score());
        delta_sum += score_a - score_b;
        let (best, other) = if a_better { (score_a, score_b) } else { (score_b, score_a) };
        if goodness(other) >= goodness(best) {
            not_worse += 1;
        }
    }
    SignificanceResult {
        p_value: not_worse as f64 / resamples as f64,
        resamples,
        delta_mean: delta_sum / resamples as f64,
        seed,
        better: if a_better { System::A } else { System::B },
    }
}

/// Paired bootstrap test between two systems sharing a reference. Each
/// resample recomputes the corpus-level metric from summed segment statistics.
pub fn bootstrap_significance(
    system_a: &[Utterance],
    system_b: &[Utterance],
    reference: &[Utterance],
    metric: Metric,
    resamples: usize,
    seed: u64,
) -> Result<SignificanceResult> {
    let n = reference.len();
    for len in [system_a.len(), system_b.len()] {
        if len != n {
            return Err(Error::CorpusLengthMismatch { hyp: len, reference: n });
        }
    }
    if n < 2 {
        return Err(Error::TooFewSegments(n));
    }
    if resamples == 0 {
        return Err(Error::NoResamples);
    }
    Ok(match metric {
        Metric::Bleu => {
            let refs: Vec<_> = reference.iter().map(|u| bleu_tokens(u, true)).collect();
            let stats = |sys: &[Utterance]| -> Vec<BleuStats> {
                sys.iter()
                    .zip(&refs)
                    .map(|(u, r)| BleuStats::from_segment(&bleu_tokens(u, true), r))
                    .collect()
            };
            run(&stats(system_a), &stats(system_b), true, resamples, seed)
        }
        Metric::Wer => {
            let refs: Vec<_> = reference.iter().map(wer_words).collect();
            let stats = |sys: &[Utterance]| -> Vec<EditCounts> {
                sys.iter().zip(&refs).map(|(u, r)| edit_counts(&wer_words(u), r)).collect()
            };
            run(&stats(system_a), &stats(system_b), false, resamples, seed)
        }
    })
}
