//! Transcription and translation quality: WER, corpus BLEU and paired
//! bootstrap significance.

mod bleu;
mod bootstrap;
mod wer;

pub use bleu::{bleu_tokens, corpus_bleu, corpus_bleu_from_tokens, BleuScore, BleuStats, MAX_ORDER};
pub use bootstrap::{bootstrap_significance, resample_indices, Metric, SignificanceResult, System};
pub use wer::{edit_counts, wer, wer_from_words, wer_words, EditCounts, WerBreakdown};
