//! Synthetic inputs shared by the benchmarks.

use subeval_core::align::BitextPair;

/// Deterministic pseudo-words: `w0`, `w1`, ... mapped through a fixed
/// multiplicative hash so sentences look varied.
fn word(prefix: &str, k: usize, vocab: usize) -> String {
    format!("{prefix}{}", (k.wrapping_mul(2_654_435_761) >> 3) % vocab)
}

/// Marked-text corpus of `n` utterances with three blocks each.
pub fn marked_corpus(n: usize, shift: usize) -> String {
    let mut out = String::new();
    for u in 0..n {
        let words: Vec<String> = (0..18).map(|k| word("w", u * 31 + k + shift * (k % 5 == 0) as usize, 400)).collect();
        out.push_str(&format!(
            "{} <eol> {} <eob> {} <eob> {} <eob>\n",
            words[..5].join(" "),
            words[5..9].join(" "),
            words[9..14].join(" "),
            words[14..].join(" ")
        ));
    }
    out
}

/// Monotone bitext from a one-to-one dictionary `sK -> tK`.
pub fn dictionary_bitext(n: usize, len: usize, vocab: usize) -> Vec<BitextPair> {
    (0..n)
        .map(|p| {
            let ids: Vec<usize> = (0..len).map(|k| (p * 7919 + k * 104_729) % vocab).collect();
            BitextPair::new(
                ids.iter().map(|i| format!("s{i}")).collect(),
                ids.iter().map(|i| format!("t{i}")).collect(),
            )
        })
        .collect()
}
