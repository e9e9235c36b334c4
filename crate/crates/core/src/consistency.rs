//! Caption/subtitle consistency: block structure, lexical placement of
//! aligned words, line counts and character ratio.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::align::SentenceAlignment;
use crate::conformity::Rate;
use crate::error::{Error, Result};
use crate::subtitle::{block_char_count, BreakKind, Utterance, UtterancePair};
use crate::text::{tokenize, Language, TokenScheme, TokenizedUtterance};

/// Block index of every word token (breaks removed), in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockIndexMap {
    word_to_block: Vec<usize>,
    surfaces: Vec<String>,
    blocks: usize,
}

impl BlockIndexMap {
    /// A word's block index is the number of block breaks before it.
    pub fn from_tokens(tokens: &TokenizedUtterance) -> Self {
        let mut word_to_block = Vec::new();
        let mut surfaces = Vec::new();
        let mut block = 0;
        let mut open = false;
        for token in &tokens.tokens {
            match token.break_kind() {
                Some(BreakKind::Block) => {
                    block += 1;
                    open = false;
                }
                Some(BreakKind::Line) => {}
                None => {
                    word_to_block.push(block);
                    surfaces.push(token.surface().to_string());
                    open = true;
                }
            }
        }
        // words after the last block break form an unterminated block
        let blocks = block + usize::from(open);
        BlockIndexMap {
            word_to_block,
            surfaces,
            blocks,
        }
    }

    pub fn word_to_block(&self) -> &[usize] {
        &self.word_to_block
    }

    pub fn surfaces(&self) -> &[String] {
        &self.surfaces
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn len(&self) -> usize {
        self.word_to_block.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word_to_block.is_empty()
    }
}

pub fn block_index_map(utterance: &Utterance, scheme: TokenScheme) -> BlockIndexMap {
    BlockIndexMap::from_tokens(&tokenize(&utterance.marked_text(), scheme))
}

/// Fraction of pairs whose caption and subtitle have the same number of blocks.
pub fn structural_consistency(pairs: &[UtterancePair]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::NoPairs);
    }
    let same = pairs.iter().filter(|p| p.same_block_count()).count();
    Ok(same as f64 / pairs.len() as f64)
}

/// Over structurally consistent pairs, the fraction of index-paired blocks
/// with equal line counts. Empty when no pair qualifies.
pub fn line_count_consistency(pairs: &[UtterancePair]) -> Rate {
    let mut rate = Rate::default();
    for pair in pairs.iter().filter(|p| p.same_block_count()) {
        for (c, s) in pair.caption().blocks().iter().zip(pair.subtitle().blocks()) {
            rate.total += 1;
            rate.conforming += usize::from(c.line_count() == s.line_count());
        }
    }
    if rate.total == 0 {
        warn!("no structurally consistent pairs; line-count consistency is undefined");
    }
    rate
}

fn utterance_chars(u: &Utterance) -> usize {
    u.blocks().iter().map(|b| block_char_count(b).iter().sum::<usize>()).sum()
}

/// Total caption characters over total subtitle characters.
pub fn char_ratio(pairs: &[UtterancePair]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::NoPairs);
    }
    let caption: usize = pairs.iter().map(|p| utterance_chars(p.caption())).sum();
    let subtitle: usize = pairs.iter().map(|p| utterance_chars(p.subtitle())).sum();
    if subtitle == 0 {
        return Err(Error::ZeroSubtitleCharacters);
    }
    Ok(caption as f64 / subtitle as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Caption,
    Subtitle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InconsistentToken {
    pub side: Side,
    pub index: usize,
    pub surface: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexicalConfig {
    pub caption_scheme: TokenScheme,
    pub subtitle_scheme: TokenScheme,
    /// Leave unaligned tokens out of both numerator and denominator.
    pub skip_unaligned: bool,
}

impl Default for LexicalConfig {
    fn default() -> Self {
        LexicalConfig {
            caption_scheme: TokenScheme::MtDetached(Language::English),
            subtitle_scheme: TokenScheme::MtDetached(Language::French),
            skip_unaligned: false,
        }
    }
}

/// Per-pair lexical consistency; serializes as one diagnostics record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexicalConsistencyPair {
    pub id: String,
    pub blocks_c: usize,
    pub blocks_s: usize,
    pub lex_c2s: f64,
    pub lex_s2c: f64,
    pub lex_pair: f64,
    pub inconsistent_tokens: Vec<InconsistentToken>,
    /// Per block index, whether every token of that block on both sides is
    /// consistent.
    #[serde(skip)]
    pub block_consistent: Vec<bool>,
}

/// Judges each token of one side: `Some(true)` when a link reaches the same
/// block on the other side, `Some(false)` when linked only elsewhere, `None`
/// when unaligned.
fn judge(own: &BlockIndexMap, other: &BlockIndexMap, links: impl Iterator<Item = (usize, usize)>) -> Vec<Option<bool>> {
    let mut verdict = vec![None; own.len()];
    for (mine, theirs) in links {
        let same = own.word_to_block[mine] == other.word_to_block[theirs];
        let v = &mut verdict[mine];
        *v = Some(v.unwrap_or(false) || same);
    }
    verdict
}

fn score(verdicts: &[Option<bool>], skip_unaligned: bool) -> f64 {
    let counted = verdicts.iter().filter(|v| !skip_unaligned || v.is_some());
    let (mut good, mut total) = (0usize, 0usize);
    for v in counted {
        total += 1;
        good += usize::from(*v == Some(true));
    }
    if total == 0 {
        1.0
    } else {
        good as f64 / total as f64
    }
}

/// Lexical consistency of one pair from precomputed block maps. Both
/// alignments are indexed `(caption token, subtitle token)`.
pub fn lexical_consistency_maps(
    id: &str,
    caption: &BlockIndexMap,
    subtitle: &BlockIndexMap,
    align_c2s: &SentenceAlignment,
    align_s2c: &SentenceAlignment,
    skip_unaligned: bool,
) -> Result<LexicalConsistencyPair> {
    align_c2s.validate(id, caption.len(), subtitle.len())?;
    align_s2c.validate(id, caption.len(), subtitle.len())?;
    let cap = judge(caption, subtitle, align_c2s.links());
    let sub = judge(subtitle, caption, align_s2c.links().map(|(c, s)| (s, c)));
    let lex_c2s = score(&cap, skip_unaligned);
    let lex_s2c = score(&sub, skip_unaligned);

    let mut inconsistent_tokens = Vec::new();
    let mut block_consistent = vec![true; caption.blocks.max(subtitle.blocks)];
    for (side, map, verdicts) in [(Side::Caption, caption, &cap), (Side::Subtitle, subtitle, &sub)] {
        for (index, v) in verdicts.iter().enumerate() {
            let failing = match v {
                Some(ok) => !ok,
                None => !skip_unaligned,
            };
            if failing {
                block_consistent[map.word_to_block[index]] = false;
                inconsistent_tokens.push(InconsistentToken {
                    side,
                    index,
                    surface: map.surfaces[index].clone(),
                });
            }
        }
    }
    Ok(LexicalConsistencyPair {
        id: id.to_string(),
        blocks_c: caption.blocks,
        blocks_s: subtitle.blocks,
        lex_c2s,
        lex_s2c,
        lex_pair: (lex_c2s + lex_s2c) / 2.0,
        inconsistent_tokens,
        block_consistent,
    })
}

/// Fraction of tokens on each side whose alignment links reach the block
/// with the same index on the other side; unaligned tokens fail unless
/// `skip_unaligned` is set.
pub fn lexical_consistency_pair(
    pair: &UtterancePair,
    align_c2s: &SentenceAlignment,
    align_s2c: &SentenceAlignment,
    config: &LexicalConfig,
) -> Result<LexicalConsistencyPair> {
    let caption = block_index_map(pair.caption(), config.caption_scheme);
    let subtitle = block_index_map(pair.subtitle(), config.subtitle_scheme);
    lexical_consistency_maps(pair.id(), &caption, &subtitle, align_c2s, align_s2c, config.skip_unaligned)
}

/// Corpus lexical consistency over all pairs and over structurally
/// consistent pairs only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusLexical {
    pub all_pairs: f64,
    pub structurally_consistent: Option<f64>,
    pub per_pair: Vec<LexicalConsistencyPair>,
}

/// Unweighted mean of `lex_pair` values.
pub fn mean_lex_pair(per_pair: &[LexicalConsistencyPair]) -> Option<f64> {
    (!per_pair.is_empty()).then(|| per_pair.iter().map(|p| p.lex_pair).sum::<f64>() / per_pair.len() as f64)
}

pub fn corpus_lexical_consistency(
    pairs: &[UtterancePair],
    alignments: &[(SentenceAlignment, SentenceAlignment)],
    config: &LexicalConfig,
) -> Result<CorpusLexical> {
    if pairs.len() != alignments.len() {
        return Err(Error::LengthMismatch {
            what: "utterance pairs vs alignments",
            left: pairs.len(),
            right: alignments.len(),
        });
    }
    if pairs.is_empty() {
        return Err(Error::NoPairs);
    }
    let per_pair = pairs
        .iter()
        .zip(alignments)
        .map(|(p, (c2s, s2c))| lexical_consistency_pair(p, c2s, s2c, config))
        .collect::<Result<Vec<_>>>()?;
    let restricted: Vec<_> = per_pair.iter().filter(|p| p.blocks_c == p.blocks_s).cloned().collect();
    Ok(CorpusLexical {
        all_pairs: mean_lex_pair(&per_pair).expect("non-empty"),
        structurally_consistent: mean_lex_pair(&restricted),
        per_pair,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValidation {
    pub mae: f64,
    pub agreement: f64,
}

/// Agreement between automatic and manual lexical consistency: mean
/// absolute error over pair scores and the fraction of matching block
/// judgements.
pub fn validate_lexical_metric(
    automatic: &[f64],
    manual: &[f64],
    auto_judgements: &[bool],
    manual_judgements: &[bool],
) -> Result<MetricValidation> {
    if automatic.len() != manual.len() {
        return Err(Error::LengthMismatch {
            what: "pair scores",
            left: automatic.len(),
            right: manual.len(),
        });
    }
    if auto_judgements.len() != manual_judgements.len() {
        return Err(Error::LengthMismatch {
            what: "block judgements",
            left: auto_judgements.len(),
            right: manual_judgements.len(),
        });
    }
    if automatic.is_empty() || auto_judgements.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mae = automatic.iter().zip(manual).map(|(a, m)| (a - m).abs()).sum::<f64>() / automatic.len() as f64;
    let agree = auto_judgements.iter().zip(manual_judgements).filter(|(a, m)| a == m).count();
    Ok(MetricValidation {
        mae,
        agreement: agree as f64 / auto_judgements.len() as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub structural: f64,
    pub lexical: f64,
    pub lexical_structurally_consistent: Option<f64>,
    pub line_count: Option<f64>,
    pub char_ratio: f64,
    pub per_pair: Vec<LexicalConsistencyPair>,
}

pub fn consistency_report(
    pairs: &[UtterancePair],
    alignments: &[(SentenceAlignment, SentenceAlignment)],
    config: &LexicalConfig,
) -> Result<ConsistencyReport> {
    let lexical = corpus_lexical_consistency(pairs, alignments, config)?;
    Ok(ConsistencyReport {
        structural: structural_consistency(pairs)?,
        lexical: lexical.all_pairs,
        lexical_structurally_consistent: lexical.structurally_consistent,
        line_count: line_count_consistency(pairs).value(),
        char_ratio: char_ratio(pairs)?,
        per_pair: lexical.per_pair,
    })
}
