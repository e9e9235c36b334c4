//! Deterministic synthetic corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subeval_core::align::BitextPair;

/// Parallel corpus from a one-to-one dictionary with monotone order, plus
/// the generating `(source, target)` links of every pair.
pub fn dictionary_corpus(pairs: usize, seed: u64) -> (Vec<BitextPair>, Vec<Vec<(usize, usize)>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab = 150;
    let mut corpus = Vec::with_capacity(pairs);
    let mut gold = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let len = rng.random_range(4..=14);
        // skewed draw so frequent and rare words both occur
        let words: Vec<usize> = (0..len).map(|_| (rng.random_range(0.0f64..1.0).powi(2) * vocab as f64) as usize).collect();
        let source = words.iter().map(|w| format!("s{w}")).collect();
        let target = words.iter().map(|w| format!("t{w}")).collect();
        corpus.push(BitextPair::new(source, target));
        gold.push((0..len).map(|i| (i, i)).collect());
    }
    (corpus, gold)
}

/// Marked-text caption and subtitle files of `n` pairs with one to three
/// blocks each; subtitles occasionally merge two caption blocks.
pub fn large_marked_corpus(n: usize, seed: u64) -> (String, String) {
    const EN: [&str; 20] = [
        "the", "river", "flows", "past", "old", "houses", "and", "quiet", "gardens", "where", "children", "play", "every",
        "summer", "evening", "under", "tall", "trees", "near", "town",
    ];
    const FR: [&str; 20] = [
        "la", "rivière", "coule", "devant", "vieilles", "maisons", "et", "calmes", "jardins", "où", "enfants", "jouent",
        "chaque", "été", "soir", "sous", "grands", "arbres", "près", "ville",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut captions, mut subtitles) = (String::new(), String::new());
    for _ in 0..n {
        let blocks = rng.random_range(1..=3);
        let mut c = Vec::new();
        let mut s = Vec::new();
        let merge = blocks > 1 && rng.random_bool(0.1);
        for b in 0..blocks {
            let len = rng.random_range(3..=9);
            let idx: Vec<usize> = (0..len).map(|_| rng.random_range(0..EN.len())).collect();
            let two_lines = len > 5 && rng.random_bool(0.3);
            let render = |words: &[&str]| {
                let mut toks: Vec<String> = idx.iter().map(|&i| words[i].to_string()).collect();
                if two_lines {
                    toks.insert(len / 2, "<eol>".into());
                }
                toks.join(" ")
            };
            c.push(format!("{} , <eob>", render(&EN)));
            let fr = render(&FR);
            if merge && b == 0 {
                s.push(format!("{fr} ,"));
            } else {
                s.push(format!("{fr} , <eob>"));
            }
        }
        captions.push_str(&c.join(" "));
        captions.push('\n');
        subtitles.push_str(&s.join(" "));
        subtitles.push('\n');
    }
    (captions, subtitles)
}
