//! End-to-end evaluation: parse, tokenize, align, score.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use log::info;
use subeval_core::align::{
    parse_bitext, parse_pharaoh_file, train_aligner, viterbi_align, AlignerConfig, BitextPair, SentenceAlignment,
};
use subeval_core::conformity::{
    default_timing_mode, length_conformity, reading_speed_conformity, segmentation_plausibility, Rate,
    SegmentationOptions,
};
use subeval_core::consistency::{
    block_index_map, char_ratio, line_count_consistency, mean_lex_pair, structural_consistency,
    lexical_consistency_maps, LexicalConsistencyPair,
};
use subeval_core::quality::{corpus_bleu, wer};
use subeval_core::subtitle::{parse_marked_text_with, GroupingMap, MarkedTextOptions};
use subeval_core::text::{attach_tags, parse_conllu, ChunkChinkTable, Lexicon, TaggedUtterance};
use subeval_core::{
    pair_documents, parse_srt, tokenize, Language, SubtitleDocument, TokenScheme, Utterance, UtterancePair,
};

use crate::config::{InputFormat, PosFormat, RunConfig};
use crate::report::{EvaluationReport, Details, SidePair};

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn load_document(path: &Path, format: InputFormat, grouping: Option<&Path>, lenient: bool) -> Result<SubtitleDocument> {
    let text = read(path)?;
    let doc = match format {
        InputFormat::MustCinema => {
            if grouping.is_some() {
                bail!("grouping maps apply to SRT input only ({})", path.display());
            }
            parse_marked_text_with(&text, &MarkedTextOptions { ids: None, lenient })
        }
        InputFormat::Srt => {
            let map = grouping
                .map(|g| GroupingMap::parse(&read(g)?).with_context(|| g.display().to_string()))
                .transpose()?;
            parse_srt(&text, map.as_ref())
        }
    };
    doc.with_context(|| path.display().to_string())
}

fn mt(lang: Language) -> TokenScheme {
    TokenScheme::MtDetached(lang)
}

/// Tags every utterance of one side from a CoNLL-U file (one sentence per
/// utterance, tags attached to detached-punctuation tokens) or a lexicon.
fn tag_side(
    utterances: &[Utterance],
    path: &Path,
    format: PosFormat,
    lang: Language,
) -> Result<Vec<TaggedUtterance>> {
    let text = read(path)?;
    let ctx = || path.display().to_string();
    let tokens = utterances.iter().map(|u| tokenize(&u.marked_text(), mt(lang)));
    match format {
        PosFormat::Conllu => {
            let sentences = parse_conllu(&text).with_context(ctx)?;
            if sentences.len() != utterances.len() {
                bail!(
                    "{}: {} CoNLL-U sentences for {} utterances",
                    path.display(),
                    sentences.len(),
                    utterances.len()
                );
            }
            tokens
                .zip(utterances)
                .zip(&sentences)
                .map(|((t, u), s)| {
                    let tags: Vec<_> = s.iter().map(|(_, tag)| *tag).collect();
                    attach_tags(&t, &tags, u.id()).with_context(ctx)
                })
                .collect()
        }
        PosFormat::Lexicon => {
            let lexicon = Lexicon::parse(&text).with_context(ctx)?;
            Ok(tokens.zip(utterances).map(|(t, u)| lexicon.tag(&t, u.id())).collect())
        }
    }
}

struct Conformity {
    length: Rate,
    reading_speed: Option<Rate>,
    segmentation: Option<Rate>,
}

fn conformity_side(
    utterances: &[Utterance],
    config: &RunConfig,
    tagged: Option<&[TaggedUtterance]>,
    segmentation: &SegmentationOptions,
) -> Result<Conformity> {
    let length = length_conformity(utterances, &config.thresholds, config.aggregation);
    let mode = config.timing.mode().or_else(|| default_timing_mode(utterances));
    let reading_speed = mode
        .map(|m| reading_speed_conformity(utterances, &config.thresholds, m))
        .transpose()?;
    let segmentation = tagged.map(|t| segmentation_plausibility(t, segmentation)).transpose()?;
    Ok(Conformity {
        length,
        reading_speed,
        segmentation,
    })
}

/// Training corpus for the aligner: optional bitext files followed by the
/// system outputs themselves.
fn training_corpus(config: &RunConfig, system: &[BitextPair]) -> Result<Vec<BitextPair>> {
    let mut corpus = Vec::new();
    for path in [&config.train_bitext, &config.extra_bitext].into_iter().flatten() {
        corpus.extend(parse_bitext(&read(path)?).with_context(|| path.display().to_string())?);
    }
    corpus.extend(system.iter().cloned());
    Ok(corpus)
}

/// Links `(caption, subtitle)` in both directions for every system pair.
pub fn align_system(
    system: &[BitextPair],
    extra: Vec<BitextPair>,
    aligner: &AlignerConfig,
) -> Result<Vec<(SentenceAlignment, SentenceAlignment)>> {
    let forward = train_aligner(&extra, aligner).context("training caption-to-subtitle model")?;
    let reversed: Vec<_> = extra.iter().map(BitextPair::reversed).collect();
    let backward = train_aligner(&reversed, aligner).context("training subtitle-to-caption model")?;
    info!(
        "aligner log-likelihood: forward {:?}, backward {:?}",
        forward.log_likelihood, backward.log_likelihood
    );
    Ok(system
        .iter()
        .map(|p| {
            // target = subtitle: every subtitle token has at most one link
            let s2c = viterbi_align(&forward.model, p);
            let c2s = viterbi_align(&backward.model, &p.reversed()).transposed();
            (c2s, s2c)
        })
        .collect())
}

pub struct Evaluation {
    pub report: EvaluationReport,
    pub per_pair: Vec<LexicalConsistencyPair>,
}

pub fn run_eval(config: &RunConfig) -> Result<Evaluation> {
    for (key, path) in config.referenced_paths() {
        if !path.exists() {
            bail!("{key}: no such file {}", path.display());
        }
    }
    let required = |p: &Option<std::path::PathBuf>| p.clone().ok_or_else(|| anyhow!("missing input"));
    let load = |path: &Path, grouping: &Option<std::path::PathBuf>| {
        load_document(path, config.format, grouping.as_deref(), config.lenient)
    };
    let captions = load(&required(&config.captions_hyp)?, &config.grouping_captions_hyp)?;
    let subtitles = load(&required(&config.subtitles_hyp)?, &config.grouping_subtitles_hyp)?;
    let pairs = pair_documents(&captions, &subtitles).context("pairing captions with subtitles")?;

    let wer_score = match &config.captions_ref {
        Some(p) => {
            let reference = load(p, &config.grouping_captions_ref)?;
            Some(wer(captions.utterances(), reference.utterances()).context("WER")?)
        }
        None => None,
    };
    let bleu_score = match &config.subtitles_ref {
        Some(p) => {
            let reference = load(p, &config.grouping_subtitles_ref)?;
            Some(corpus_bleu(subtitles.utterances(), reference.utterances(), true).context("BLEU")?)
        }
        None => None,
    };

    let (cap_tags, sub_tags) = if config.skip_segmentation {
        (None, None)
    } else {
        let (Some(pc), Some(ps)) = (&config.pos_captions, &config.pos_subtitles) else {
            bail!("segmentation requires POS input");
        };
        (
            Some(tag_side(captions.utterances(), pc, config.pos_format, config.src_lang)?),
            Some(tag_side(subtitles.utterances(), ps, config.pos_format, config.tgt_lang)?),
        )
    };
    let classes = match &config.chunk_chink_table {
        Some(p) => ChunkChinkTable::parse(&read(p)?).with_context(|| p.display().to_string())?,
        None => ChunkChinkTable::default(),
    };
    let segmentation = SegmentationOptions {
        include_trailing_eob: !config.exclude_trailing_eob,
        direction: config.break_order,
        breaks: config.breaks,
        classes,
    };
    let cap_conf = conformity_side(captions.utterances(), config, cap_tags.as_deref(), &segmentation)
        .context("caption conformity")?;
    let sub_conf = conformity_side(subtitles.utterances(), config, sub_tags.as_deref(), &segmentation)
        .context("subtitle conformity")?;

    let maps: Vec<_> = pairs
        .iter()
        .map(|p| {
            (
                block_index_map(p.caption(), mt(config.src_lang)),
                block_index_map(p.subtitle(), mt(config.tgt_lang)),
            )
        })
        .collect();
    let alignments = alignments_for(config, &pairs, &maps)?;
    let per_pair = pairs
        .iter()
        .zip(&maps)
        .zip(&alignments)
        .map(|((p, (c, s)), (c2s, s2c))| lexical_consistency_maps(p.id(), c, s, c2s, s2c, config.skip_unaligned))
        .collect::<subeval_core::Result<Vec<_>>>()?;
    let restricted: Vec<_> = per_pair.iter().filter(|p| p.blocks_c == p.blocks_s).cloned().collect();

    let line_count = line_count_consistency(&pairs);
    let report = EvaluationReport {
        system_name: config.system_name.clone(),
        wer: wer_score.map(|w| w.wer),
        bleu: bleu_score.map(|b| b.score),
        length: SidePair::new(cap_conf.length.value(), sub_conf.length.value()),
        reading_speed: SidePair::new(
            cap_conf.reading_speed.and_then(|r| r.value()),
            sub_conf.reading_speed.and_then(|r| r.value()),
        ),
        segmentation: SidePair::new(
            cap_conf.segmentation.and_then(|r| r.value()),
            sub_conf.segmentation.and_then(|r| r.value()),
        ),
        structural: structural_consistency(&pairs)?,
        lexical: mean_lex_pair(&per_pair).ok_or_else(|| anyhow!("no utterance pairs"))?,
        line_count: line_count.value(),
        char_ratio: char_ratio(&pairs)?,
        details: Details {
            utterances: pairs.len(),
            wer: wer_score,
            bleu: bleu_score,
            length: SidePair::new(Some(cap_conf.length), Some(sub_conf.length)),
            reading_speed: SidePair::new(cap_conf.reading_speed, sub_conf.reading_speed),
            segmentation: SidePair::new(cap_conf.segmentation, sub_conf.segmentation),
            lexical_structurally_consistent: mean_lex_pair(&restricted),
            line_count,
            alignment_source: if config.align_c2s.is_some() { "files" } else { "trained" }.to_string(),
        },
        config_echo: config.entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
    };
    Ok(Evaluation { report, per_pair })
}

fn alignments_for(
    config: &RunConfig,
    pairs: &[UtterancePair],
    maps: &[(subeval_core::consistency::BlockIndexMap, subeval_core::consistency::BlockIndexMap)],
) -> Result<Vec<(SentenceAlignment, SentenceAlignment)>> {
    if let (Some(c2s), Some(s2c)) = (&config.align_c2s, &config.align_s2c) {
        let read_links = |p: &Path| -> Result<Vec<SentenceAlignment>> {
            let links = parse_pharaoh_file(&read(p)?).with_context(|| p.display().to_string())?;
            if links.len() != pairs.len() {
                bail!("{}: {} alignment lines for {} utterance pairs", p.display(), links.len(), pairs.len());
            }
            Ok(links)
        };
        return Ok(read_links(c2s)?.into_iter().zip(read_links(s2c)?).collect());
    }
    let system: Vec<BitextPair> = maps
        .iter()
        .map(|(c, s)| BitextPair::new(c.surfaces().to_vec(), s.surfaces().to_vec()))
        .collect();
    for (k, p) in system.iter().enumerate() {
        p.validate(k).with_context(|| format!("utterance {}", pairs[k].id()))?;
    }
    let corpus = training_corpus(config, &system)?;
    align_system(&system, corpus, &config.aligner)
}
