//! Brute-force reference implementations. Nothing here calls into the
//! library: files are parsed by hand and every metric is recomputed from
//! first principles.

use std::collections::HashMap;

use regex::Regex;

#[derive(Debug, Clone)]
pub struct Block {
    pub lines: Vec<String>,
    pub start_ms: u64,
    pub end_ms: u64,
}

pub type Utt = Vec<Block>;

fn parse_ts(s: &str) -> u64 {
    let (hms, ms) = s.trim().split_once(',').unwrap();
    let parts: Vec<u64> = hms.split(':').map(|x| x.parse().unwrap()).collect();
    ((parts[0] * 60 + parts[1]) * 60 + parts[2]) * 1000 + ms.parse::<u64>().unwrap()
}

/// SRT cues grouped into utterances by a `id<TAB>n,n,...` map.
pub fn read_srt(srt: &str, groups: &str) -> Vec<Utt> {
    let mut cues: HashMap<usize, Block> = HashMap::new();
    for chunk in srt.split("\n\n").filter(|c| !c.trim().is_empty()) {
        let lines: Vec<&str> = chunk.lines().collect();
        let n: usize = lines[0].trim().parse().unwrap();
        let (a, b) = lines[1].split_once("-->").unwrap();
        cues.insert(
            n,
            Block {
                lines: lines[2..].iter().map(|l| l.trim().to_string()).collect(),
                start_ms: parse_ts(a),
                end_ms: parse_ts(b),
            },
        );
    }
    groups
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let ids = l.split('\t').nth(1).unwrap();
            ids.split(',').map(|n| cues[&n.parse::<usize>().unwrap()].clone()).collect()
        })
        .collect()
}

/// Marked-text lines split into blocks of lines.
pub fn read_marked(text: &str) -> Vec<Utt> {
    text.lines()
        .map(|line| {
            line.split("<eob>")
                .filter(|b| !b.trim().is_empty())
                .map(|b| Block {
                    lines: b.split("<eol>").map(|l| l.split_whitespace().collect::<Vec<_>>().join(" ")).collect(),
                    start_ms: 0,
                    end_ms: 0,
                })
                .collect()
        })
        .collect()
}

// ---- WER ----

fn strip_edges(w: &str) -> String {
    let keep = |c: &char| c.is_alphanumeric();
    let chars: Vec<char> = w.chars().collect();
    let Some(first) = chars.iter().position(&keep) else { return String::new() };
    let last = chars.iter().rposition(&keep).unwrap();
    chars[first..=last].iter().collect::<String>().to_lowercase()
}

pub fn wer_words(u: &Utt) -> Vec<String> {
    u.iter()
        .flat_map(|b| b.lines.iter())
        .flat_map(|l| l.split_whitespace())
        .map(strip_edges)
        .filter(|w| !w.is_empty())
        .collect()
}

/// Textbook Levenshtein distance, full matrix.
pub fn edit_distance(a: &[String], b: &[String]) -> usize {
    let mut m = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in m.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in m[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = m[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            m[i][j] = sub.min(m[i - 1][j] + 1).min(m[i][j - 1] + 1);
        }
    }
    m[a.len()][b.len()]
}

/// Corpus WER in percent.
pub fn wer(hyp: &[Utt], reference: &[Utt]) -> f64 {
    let (mut edits, mut words) = (0, 0);
    for (h, r) in hyp.iter().zip(reference) {
        let (h, r) = (wer_words(h), wer_words(r));
        edits += edit_distance(&r, &h);
        words += r.len();
    }
    100.0 * edits as f64 / words as f64
}

// ---- BLEU ----

/// mteval-v13a tokenization, transcribed from the reference Python.
pub fn tok_13a(line: &str) -> Vec<String> {
    let mut s = line.replace("<skipped>", "").replace("-\n", "").replace('\n', " ");
    if s.contains('&') {
        s = s.replace("&quot;", "\"").replace("&amp;", "&").replace("&lt;", "<").replace("&gt;", ">");
    }
    let s = format!(" {s} ");
    let rules = [
        (r"([\{-~\[-` -&\(-\+:-@/])", " $1 "),
        (r"([^0-9])([\.,])", "$1 $2 "),
        (r"([\.,])([^0-9])", " $1 $2"),
        (r"([0-9])(-)", "$1 $2 "),
    ];
    let mut s = s;
    for (pat, rep) in rules {
        s = Regex::new(pat).unwrap().replace_all(&s, rep).into_owned();
    }
    s.split_whitespace().map(String::from).collect()
}

fn ngrams(toks: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut m = HashMap::new();
    if toks.len() >= n {
        for w in toks.windows(n) {
            *m.entry(w).or_insert(0) += 1;
        }
    }
    m
}

/// Corpus BLEU with exponential smoothing, percent scale.
pub fn bleu(hyp: &[Vec<String>], reference: &[Vec<String>]) -> f64 {
    let mut correct = [0usize; 4];
    let mut total = [0usize; 4];
    let (mut hl, mut rl) = (0usize, 0usize);
    for (h, r) in hyp.iter().zip(reference) {
        hl += h.len();
        rl += r.len();
        for n in 1..=4 {
            let rc = ngrams(r, n);
            for (g, c) in ngrams(h, n) {
                total[n - 1] += c;
                correct[n - 1] += c.min(*rc.get(g).unwrap_or(&0));
            }
        }
    }
    if hl == 0 {
        return 0.0;
    }
    let mut smooth = 1.0;
    let mut log_sum = 0.0;
    for n in 0..4 {
        if total[n] == 0 {
            return 0.0;
        }
        let p = if correct[n] == 0 {
            smooth *= 2.0;
            100.0 / (smooth * total[n] as f64)
        } else {
            100.0 * correct[n] as f64 / total[n] as f64
        };
        log_sum += p.ln();
    }
    let bp = if hl < rl { (1.0 - rl as f64 / hl as f64).exp() } else { 1.0 };
    bp * (log_sum / 4.0).exp()
}

/// `13a` tokens of every line with `<eol>` / `<eob>` kept between them.
pub fn bleu_tokens_with_breaks(u: &Utt) -> Vec<String> {
    let mut out = Vec::new();
    for b in u {
        for (k, l) in b.lines.iter().enumerate() {
            if k > 0 {
                out.push("<eol>".to_string());
            }
            out.extend(tok_13a(l));
        }
        out.push("<eob>".to_string());
    }
    out
}

pub fn bleu_tokens_plain(u: &Utt) -> Vec<String> {
    let text: Vec<&str> = u.iter().flat_map(|b| b.lines.iter()).map(String::as_str).collect();
    tok_13a(&text.join(" "))
}

// ---- conformity ----

pub fn chars(line: &str) -> usize {
    line.chars().count()
}

/// (conforming, total) over lines.
pub fn length_rate(utts: &[Utt], max_cpl: usize) -> (usize, usize) {
    let lines: Vec<&String> = utts.iter().flatten().flat_map(|b| b.lines.iter()).collect();
    (lines.iter().filter(|l| chars(l) <= max_cpl).count(), lines.len())
}

/// (conforming, total) over timed blocks.
pub fn reading_speed_rate(utts: &[Utt], max_cps: f64) -> (usize, usize) {
    let blocks: Vec<&Block> = utts.iter().flatten().collect();
    let ok = blocks
        .iter()
        .filter(|b| {
            let n: usize = b.lines.iter().map(|l| chars(l)).sum();
            let secs = (b.end_ms - b.start_ms) as f64 / 1000.0;
            n as f64 / secs <= max_cps
        })
        .count();
    (ok, blocks.len())
}

/// Tokens of the micro corpus: whitespace words with trailing `, . ? :`
/// detached and a French elided `l'` split off. Breaks are `<eol>`/`<eob>`.
pub fn simple_tokens(u: &Utt) -> Vec<String> {
    let mut out = Vec::new();
    for b in u {
        for (k, l) in b.lines.iter().enumerate() {
            if k > 0 {
                out.push("<eol>".to_string());
            }
            for w in l.split_whitespace() {
                let mut w = w;
                if let Some(rest) = w.strip_prefix("l'") {
                    out.push("l'".to_string());
                    w = rest;
                }
                let mut tail = Vec::new();
                while let Some(c) = w.chars().last().filter(|c| ",.?:".contains(*c)) {
                    tail.push(c.to_string());
                    w = &w[..w.len() - 1];
                }
                if !w.is_empty() {
                    out.push(w.to_string());
                }
                out.extend(tail.into_iter().rev());
            }
        }
        out.push("<eob>".to_string());
    }
    out
}

pub fn is_break(t: &str) -> bool {
    t == "<eol>" || t == "<eob>"
}

/// CoNLL-U UPOS column, one vector per sentence.
pub fn read_conllu_tags(text: &str) -> Vec<Vec<String>> {
    text.split("\n\n")
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.lines()
                .filter(|l| !l.starts_with('#'))
                .map(|l| l.split('\t').nth(3).unwrap().to_string())
                .collect()
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Class {
    Content,
    Function,
    Punct,
}

fn class(tag: &str) -> Class {
    match tag {
        "PUNCT" => Class::Punct,
        "ADP" | "AUX" | "CCONJ" | "SCONJ" | "DET" | "PART" | "PRON" => Class::Function,
        _ => Class::Content,
    }
}

/// Every break judged by the content/function/punctuation rules, the final
/// `<eob>` included.
pub fn segmentation_rate(utts: &[Utt], tags: &[Vec<String>]) -> (usize, usize) {
    let (mut ok, mut total) = (0, 0);
    for (u, tags) in utts.iter().zip(tags) {
        let toks = simple_tokens(u);
        let words: Vec<usize> = (0..toks.len()).filter(|&i| !is_break(&toks[i])).collect();
        assert_eq!(words.len(), tags.len(), "tag count");
        let tag_of = |tok_index: usize| &tags[words.iter().position(|&w| w == tok_index).unwrap()];
        for i in 0..toks.len() {
            if !is_break(&toks[i]) {
                continue;
            }
            let prev = (0..i).rev().find(|&k| !is_break(&toks[k]));
            let next = (i + 1..toks.len()).find(|&k| !is_break(&toks[k]));
            let pc = prev.map(|k| class(tag_of(k)));
            let good = match (pc, next) {
                (Some(Class::Punct), _) => true,
                (_, None) => false,
                (Some(Class::Content), Some(n)) => class(tag_of(n)) == Class::Function,
                _ => false,
            };
            total += 1;
            ok += usize::from(good);
        }
    }
    (ok, total)
}

// ---- consistency ----

pub fn structural(c: &[Utt], s: &[Utt]) -> f64 {
    c.iter().zip(s).filter(|(a, b)| a.len() == b.len()).count() as f64 / c.len() as f64
}

pub fn line_count(c: &[Utt], s: &[Utt]) -> (usize, usize) {
    let (mut ok, mut total) = (0, 0);
    for (a, b) in c.iter().zip(s).filter(|(a, b)| a.len() == b.len()) {
        for (x, y) in a.iter().zip(b) {
            total += 1;
            ok += usize::from(x.lines.len() == y.lines.len());
        }
    }
    (ok, total)
}

pub fn char_ratio(c: &[Utt], s: &[Utt]) -> f64 {
    let count = |u: &[Utt]| -> usize { u.iter().flatten().flat_map(|b| b.lines.iter()).map(|l| chars(l)).sum() };
    count(c) as f64 / count(s) as f64
}

/// Block index of every non-break token.
pub fn word_blocks(toks: &[String]) -> Vec<usize> {
    let mut block = 0;
    let mut out = Vec::new();
    for t in toks {
        if t == "<eob>" {
            block += 1;
        } else if t != "<eol>" {
            out.push(block);
        }
    }
    out
}

pub fn read_pharaoh(line: &str) -> Vec<(usize, usize)> {
    line.split_whitespace()
        .map(|p| {
            let (a, b) = p.split_once('-').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

/// Fraction of tokens with at least one link into the same block index.
/// `links` are `(this side, other side)`.
pub fn lex_side(this: &[usize], other: &[usize], links: &[(usize, usize)]) -> (f64, Vec<usize>) {
    let mut bad = Vec::new();
    for (i, &blk) in this.iter().enumerate() {
        let good = links.iter().any(|&(a, b)| a == i && other[b] == blk);
        if !good {
            bad.push(i);
        }
    }
    (1.0 - bad.len() as f64 / this.len() as f64, bad)
}

/// `(lex_c2s, lex_s2c)` of one pair; alignments are `(caption, subtitle)`.
pub fn lex_pair(cap: &[usize], sub: &[usize], c2s: &[(usize, usize)], s2c: &[(usize, usize)]) -> (f64, f64) {
    let flipped: Vec<(usize, usize)> = s2c.iter().map(|&(c, s)| (s, c)).collect();
    (lex_side(cap, sub, c2s).0, lex_side(sub, cap, &flipped).0)
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}
