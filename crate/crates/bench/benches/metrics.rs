use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use subeval_bench::marked_corpus;
use subeval_core::quality::{bootstrap_significance, corpus_bleu, wer, Metric};
use subeval_core::parse_marked_text;

fn metrics(c: &mut Criterion) {
    let reference = parse_marked_text(&marked_corpus(1000, 0)).unwrap().into_utterances();
    let hyp = parse_marked_text(&marked_corpus(1000, 3)).unwrap().into_utterances();

    c.bench_function("wer_1k", |b| b.iter(|| wer(black_box(&hyp), black_box(&reference)).unwrap()));
    c.bench_function("bleu_1k", |b| {
        b.iter(|| corpus_bleu(black_box(&hyp), black_box(&reference), true).unwrap())
    });
    c.bench_function("bootstrap_bleu_1k_x100", |b| {
        b.iter(|| bootstrap_significance(&hyp, &reference, &reference, Metric::Bleu, 100, 1).unwrap())
    });
}

criterion_group!(benches, metrics);
criterion_main!(benches);
