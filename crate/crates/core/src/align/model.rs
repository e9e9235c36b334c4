use std::collections::HashMap;
use std::fmt::Write as _;

use log::debug;
use serde::{Deserialize, Serialize};

use super::{BitextPair, SentenceAlignment};
use crate::error::{Error, Result};

/// Source-side symbol that absorbs unaligned target words.
pub const NULL_SYMBOL: &str = "<null>";
/// Lexical probability assumed for unseen word pairs at decoding time.
pub const OOV_FLOOR: f64 = 1e-9;
pub const MIN_TENSION: f64 = 0.1;
pub const MAX_TENSION: f64 = 14.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignerConfig {
    pub iterations: usize,
    pub use_diagonal_prior: bool,
    /// Prior mass of the NULL source position, in `[0, 1)`.
    pub null_prob: f64,
    pub initial_tension: f64,
    /// Gradient updates of the tension after the first iteration.
    pub optimize_tension: bool,
}

impl Default for AlignerConfig {
    fn default() -> Self {
        AlignerConfig {
            iterations: 5,
            use_diagonal_prior: true,
            null_prob: 0.08,
            initial_tension: 4.0,
            optimize_tension: true,
        }
    }
}

impl AlignerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.null_prob) {
            return Err(Error::InvalidAlignerParameter(format!(
                "null probability must lie in [0, 1), got {}",
                self.null_prob
            )));
        }
        if !(self.initial_tension.is_finite() && self.initial_tension >= 0.0) {
            return Err(Error::InvalidAlignerParameter(format!(
                "tension must be non-negative, got {}",
                self.initial_tension
            )));
        }
        Ok(())
    }
}

/// Lexical table `t(target | source)` with the alignment prior parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationModel {
    /// Index 0 is NULL.
    source_vocab: Vec<String>,
    target_vocab: Vec<String>,
    source_ids: HashMap<String, u32>,
    target_ids: HashMap<String, u32>,
    /// Per source id, `(target id, probability)` sorted by target id.
    rows: Vec<Vec<(u32, f64)>>,
    tension: f64,
    null_prob: f64,
    use_diagonal_prior: bool,
}

#[derive(Debug, Clone)]
pub struct TrainingRun {
    pub model: TranslationModel,
    /// Corpus log-likelihood under the parameters entering each iteration.
    pub log_likelihood: Vec<f64>,
    /// Tension after each iteration.
    pub tension: Vec<f64>,
}

#[derive(Default)]
struct Vocab {
    words: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocab {
    fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.ids.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(word.to_string());
        self.ids.insert(word.to_string(), id);
        id
    }
}

/// Fills `prior[0..=m]` for 0-based target position `j` of `n`: NULL at
/// index 0, source positions 1..=m after it. Returns the prior-weighted
/// mean distance `Σ w_i h_i / Σ w_i` used by the tension gradient.
fn fill_prior(prior: &mut Vec<f64>, m: usize, n: usize, j: usize, diagonal: bool, tension: f64, p0: f64) -> f64 {
    prior.clear();
    prior.push(p0);
    if !diagonal {
        prior.extend(std::iter::repeat_n((1.0 - p0) / m as f64, m));
        return 0.0;
    }
    let jn = (j + 1) as f64 / n as f64;
    let mut z = 0.0;
    let mut weighted = 0.0;
    for i in 1..=m {
        let h = (i as f64 / m as f64 - jn).abs();
        let w = (-tension * h).exp();
        z += w;
        weighted += w * h;
        prior.push(w);
    }
    for w in &mut prior[1..] {
        *w *= (1.0 - p0) / z;
    }
    weighted / z
}

fn distance(i: usize, m: usize, j: usize, n: usize) -> f64 {
    (i as f64 / m as f64 - (j + 1) as f64 / n as f64).abs()
}

/// EM training of the lexical table under a uniform or diagonal alignment
/// prior. Deterministic.
pub fn train_aligner(corpus: &[BitextPair], config: &AlignerConfig) -> Result<TrainingRun> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    for (k, pair) in corpus.iter().enumerate() {
        pair.validate(k)?;
    }

    let mut src = Vocab::default();
    src.intern(NULL_SYMBOL);
    let mut tgt = Vocab::default();
    let encoded: Vec<(Vec<u32>, Vec<u32>)> = corpus
        .iter()
        .map(|p| {
            let s = std::iter::once(0).chain(p.source.iter().map(|w| src.intern(w))).collect();
            let t = p.target.iter().map(|w| tgt.intern(w)).collect();
            (s, t)
        })
        .collect();

    let mut cooc: Vec<Vec<u32>> = vec![Vec::new(); src.words.len()];
    for (s, t) in &encoded {
        for &e in s {
            cooc[e as usize].extend_from_slice(t);
        }
    }
    for row in &mut cooc {
        row.sort_unstable();
        row.dedup();
    }
    let mut probs: Vec<Vec<f64>> = cooc.iter().map(|r| vec![1.0 / r.len() as f64; r.len()]).collect();
    let mut counts: Vec<Vec<f64>> = cooc.iter().map(|r| vec![0.0; r.len()]).collect();

    // slot of (source position i, target position j) in row `s[i]`,
    // laid out as i * n + j
    let slots: Vec<Vec<u32>> = encoded
        .iter()
        .map(|(s, t)| {
            let mut v = Vec::with_capacity(s.len() * t.len());
            for &e in s {
                let row = &cooc[e as usize];
                v.extend(t.iter().map(|f| row.binary_search(f).expect("co-occurrence recorded") as u32));
            }
            v
        })
        .collect();

    let p0 = config.null_prob;
    let diagonal = config.use_diagonal_prior;
    let mut tension = config.initial_tension;
    let mut log_likelihood = Vec::with_capacity(config.iterations);
    let mut tensions = Vec::with_capacity(config.iterations);
    let mut prior = Vec::new();
    let mut post = Vec::new();

    for iter in 0..config.iterations {
        let mut ll = 0.0;
        let mut gradient = 0.0;
        let mut target_tokens = 0usize;
        for ((s, t), slot) in encoded.iter().zip(&slots) {
            let (m, n) = (s.len() - 1, t.len());
            for j in 0..n {
                let mean_h = fill_prior(&mut prior, m, n, j, diagonal, tension, p0);
                post.clear();
                let mut z = 0.0;
                for i in 0..=m {
                    let p = probs[s[i] as usize][slot[i * n + j] as usize] * prior[i];
                    z += p;
                    post.push(p);
                }
                ll += z.ln();
                target_tokens += 1;
                for i in 0..=m {
                    let q = post[i] / z;
                    counts[s[i] as usize][slot[i * n + j] as usize] += q;
                    if i > 0 && diagonal {
                        gradient += q * (mean_h - distance(i, m, j, n));
                    }
                }
            }
        }
        debug!("iteration {iter}: log-likelihood {ll}, tension {tension}");
        log_likelihood.push(ll);

        for (row_p, row_c) in probs.iter_mut().zip(&mut counts) {
            let total: f64 = row_c.iter().sum();
            if total > 0.0 {
                for (p, c) in row_p.iter_mut().zip(row_c.iter()) {
                    *p = c / total;
                }
            }
            row_c.iter_mut().for_each(|c| *c = 0.0);
        }
        if diagonal && config.optimize_tension && iter > 0 {
            tension = (tension + gradient / target_tokens as f64).clamp(MIN_TENSION, MAX_TENSION);
        }
        tensions.push(tension);
    }

    let rows = cooc
        .into_iter()
        .zip(probs)
        .map(|(ids, ps)| ids.into_iter().zip(ps).collect())
        .collect();
    let model = TranslationModel {
        source_vocab: src.words,
        target_vocab: tgt.words,
        source_ids: src.ids,
        target_ids: tgt.ids,
        rows,
        tension,
        null_prob: p0,
        use_diagonal_prior: diagonal,
    };
    Ok(TrainingRun {
        model,
        log_likelihood,
        tension: tensions,
    })
}

impl TranslationModel {
    pub fn tension(&self) -> f64 {
        self.tension
    }

    pub fn null_prob(&self) -> f64 {
        self.null_prob
    }

    pub fn use_diagonal_prior(&self) -> bool {
        self.use_diagonal_prior
    }

    /// `t(target | source)`, with `None` as the NULL source. `None` when the
    /// pair never co-occurred.
    pub fn prob(&self, source: Option<&str>, target: &str) -> Option<f64> {
        let s = match source {
            None => 0,
            Some(w) => *self.source_ids.get(w)?,
        };
        self.lookup(s, target)
    }

    fn lookup(&self, source_id: u32, target: &str) -> Option<f64> {
        let t = *self.target_ids.get(target)?;
        let row = &self.rows[source_id as usize];
        row.binary_search_by_key(&t, |&(id, _)| id).ok().map(|k| row[k].1)
    }

    /// Every table entry as `(source, target, probability)`, sorted by
    /// source then target; the NULL source is written as [`NULL_SYMBOL`].
    pub fn entries(&self) -> Vec<(&str, &str, f64)> {
        let mut out: Vec<_> = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(s, row)| {
                row.iter()
                    .map(move |&(t, p)| (self.source_vocab[s].as_str(), self.target_vocab[t as usize].as_str(), p))
            })
            .collect();
        out.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        out
    }

    /// Sum of each non-empty row, keyed like [`entries`](Self::entries).
    pub fn row_sums(&self) -> Vec<(&str, f64)> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, row)| !row.is_empty())
            .map(|(s, row)| (self.source_vocab[s].as_str(), row.iter().map(|&(_, p)| p).sum()))
            .collect()
    }

    /// Plain-text serialization: a `#!` header with the prior parameters,
    /// then one `source target probability` line per entry.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "#! tension={} null_prob={} diagonal={}\n",
            self.tension, self.null_prob, self.use_diagonal_prior
        );
        for (s, t, p) in self.entries() {
            let _ = writeln!(out, "{s} {t} {p}");
        }
        out
    }

    pub fn from_text(input: &str) -> Result<Self> {
        let malformed = |line: usize, message: String| Error::MalformedModel { line, message };
        let mut lines = input.lines().enumerate();
        let header = match lines.next() {
            Some((_, h)) if h.starts_with("#!") => h,
            _ => return Err(malformed(1, "missing '#!' header".into())),
        };
        let (mut tension, mut null_prob, mut diagonal) = (None, None, None);
        for field in header[2..].split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| malformed(1, format!("header field {field:?} is not key=value")))?;
            let bad = || malformed(1, format!("bad value for {key}: {value:?}"));
            match key {
                "tension" => tension = Some(value.parse::<f64>().map_err(|_| bad())?),
                "null_prob" => null_prob = Some(value.parse::<f64>().map_err(|_| bad())?),
                "diagonal" => diagonal = Some(value.parse::<bool>().map_err(|_| bad())?),
                _ => return Err(malformed(1, format!("unknown header key {key:?}"))),
            }
        }
        let missing = |k: &str| malformed(1, format!("header lacks {k}"));
        let tension = tension.ok_or_else(|| missing("tension"))?;
        let null_prob = null_prob.ok_or_else(|| missing("null_prob"))?;
        let use_diagonal_prior = diagonal.ok_or_else(|| missing("diagonal"))?;
        AlignerConfig {
            null_prob,
            initial_tension: tension,
            ..AlignerConfig::default()
        }
        .validate()
        .map_err(|e| malformed(1, e.to_string()))?;

        let mut src = Vocab::default();
        src.intern(NULL_SYMBOL);
        let mut tgt = Vocab::default();
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new()];
        for (k, line) in lines {
            let n = k + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [s, t, p] = fields[..] else {
                return Err(malformed(n, format!("expected 3 fields, found {}", fields.len())));
            };
            let p: f64 = p.parse().map_err(|_| malformed(n, format!("bad probability {p:?}")))?;
            if !(0.0..=1.0).contains(&p) {
                return Err(malformed(n, format!("probability {p} outside [0, 1]")));
            }
            let s = src.intern(s) as usize;
            if s == rows.len() {
                rows.push(Vec::new());
            }
            rows[s].push((tgt.intern(t), p));
        }
        for (s, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|&(t, _)| t);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(malformed(0, format!("duplicate entry for source {:?}", src.words[s])));
            }
            let sum: f64 = row.iter().map(|&(_, p)| p).sum();
            if !row.is_empty() && (sum - 1.0).abs() > 1e-6 {
                return Err(malformed(0, format!("row {:?} sums to {sum}", src.words[s])));
            }
        }
        Ok(TranslationModel {
            source_vocab: src.words,
            target_vocab: tgt.words,
            source_ids: src.ids,
            target_ids: tgt.ids,
            rows,
            tension,
            null_prob,
            use_diagonal_prior,
        })
    }
}

/// Best source position for every target word, or none when NULL scores
/// strictly higher. Unseen pairs get [`OOV_FLOOR`]; ties go to the smaller
/// source index. Links are `(source_index, target_index)`.
pub fn viterbi_align(model: &TranslationModel, pair: &BitextPair) -> SentenceAlignment {
    let (m, n) = (pair.source.len(), pair.target.len());
    let mut alignment = SentenceAlignment::new();
    if m == 0 {
        return alignment;
    }
    let source_ids: Vec<Option<u32>> = pair.source.iter().map(|w| model.source_ids.get(w).copied()).collect();
    let mut prior = Vec::with_capacity(m + 1);
    for (j, word) in pair.target.iter().enumerate() {
        fill_prior(&mut prior, m, n, j, model.use_diagonal_prior, model.tension, model.null_prob);
        let t = |s: Option<u32>| s.and_then(|s| model.lookup(s, word)).unwrap_or(OOV_FLOOR);
        let null_score = t(Some(0)) * prior[0];
        let mut best = (0usize, f64::NEG_INFINITY);
        for (i, &s) in source_ids.iter().enumerate() {
            let score = t(s) * prior[i + 1];
            if score > best.1 {
                best = (i, score);
            }
        }
        if best.1 >= null_score {
            alignment.insert(best.0, j);
        }
    }
    alignment
}
