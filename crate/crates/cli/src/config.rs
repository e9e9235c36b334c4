//! Run configuration: a flat `key value` file whose keys are the long flag
//! names of `subeval eval`. Command-line flags override file values.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use subeval_core::align::AlignerConfig;
use subeval_core::conformity::{BreakDirection, BreakSelection, ConformityThresholds, LengthAggregation, TimingMode};
use subeval_core::Language;

use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    MustCinema,
    Srt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PosFormat {
    Conllu,
    Lexicon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Json,
    Tsv,
    Both,
}

/// Timing unit for reading speed; `Auto` picks blocks when every block is
/// timed, else utterances, else skips the metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TimingChoice {
    Auto,
    Block,
    Utterance,
}

impl TimingChoice {
    pub fn mode(self) -> Option<TimingMode> {
        match self {
            TimingChoice::Auto => None,
            TimingChoice::Block => Some(TimingMode::PerBlock),
            TimingChoice::Utterance => Some(TimingMode::PerUtterance),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Path,
    Value,
    Bool,
}

pub struct KeySpec {
    pub key: &'static str,
    pub kind: ValueKind,
    pub help: &'static str,
}

const fn key(key: &'static str, kind: ValueKind, help: &'static str) -> KeySpec {
    KeySpec { key, kind, help }
}

use ValueKind::{Bool, Path as P, Value as V};

/// Every configuration key, in echo order.
pub const KEYS: &[KeySpec] = &[
    key("system-name", V, "Name reported for the evaluated system"),
    key("captions-hyp", P, "System captions"),
    key("captions-ref", P, "Reference captions (enables WER)"),
    key("subtitles-hyp", P, "System subtitles"),
    key("subtitles-ref", P, "Reference subtitles (enables BLEU)"),
    key("format", V, "Input format: mustcinema|srt"),
    key("grouping-captions-hyp", P, "SRT cue-to-utterance map for system captions"),
    key("grouping-captions-ref", P, "SRT cue-to-utterance map for reference captions"),
    key("grouping-subtitles-hyp", P, "SRT cue-to-utterance map for system subtitles"),
    key("grouping-subtitles-ref", P, "SRT cue-to-utterance map for reference subtitles"),
    key("lenient", Bool, "Drop empty segments instead of failing"),
    key("src-lang", V, "Caption language code for tokenization"),
    key("tgt-lang", V, "Subtitle language code for tokenization"),
    key("max-cpl", V, "Maximum characters per line"),
    key("max-cps", V, "Maximum characters per second"),
    key("aggregation", V, "Length conformity unit: line|block"),
    key("timing", V, "Reading speed unit: auto|block|utterance"),
    key("skip-segmentation", Bool, "Do not compute segmentation plausibility"),
    key("pos-captions", P, "POS tags of the system captions"),
    key("pos-subtitles", P, "POS tags of the system subtitles"),
    key("pos-format", V, "POS file format: conllu|lexicon"),
    key("chunk-chink-table", P, "Overrides of the UPOS word-class table"),
    key("breaks", V, "Breaks judged for segmentation: eol|eob|both"),
    key("exclude-trailing-eob", Bool, "Ignore utterance-final breaks in segmentation"),
    key("break-order", V, "Accepted word-class order around a break: content-function|either"),
    key("align-c2s", P, "Pharaoh links, each caption token linked at most once"),
    key("align-s2c", P, "Pharaoh links, each subtitle token linked at most once"),
    key("train-bitext", P, "Bitext (`caption ||| subtitle`) added to aligner training"),
    key("extra-bitext", P, "Further bitext appended to aligner training"),
    key("iterations", V, "EM iterations"),
    key("null-prob", V, "Prior probability of the NULL alignment"),
    key("tension", V, "Initial diagonal tension"),
    key("diagonal", Bool, "Use the diagonal alignment prior"),
    key("optimize-tension", Bool, "Update the tension during training"),
    key("skip-unaligned", Bool, "Leave unaligned tokens out of lexical consistency"),
    key("seed", V, "Seed for resampling"),
    key("out", V, "Report format: json|tsv|both"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system_name: String,
    pub captions_hyp: Option<PathBuf>,
    pub captions_ref: Option<PathBuf>,
    pub subtitles_hyp: Option<PathBuf>,
    pub subtitles_ref: Option<PathBuf>,
    pub format: InputFormat,
    pub grouping_captions_hyp: Option<PathBuf>,
    pub grouping_captions_ref: Option<PathBuf>,
    pub grouping_subtitles_hyp: Option<PathBuf>,
    pub grouping_subtitles_ref: Option<PathBuf>,
    pub lenient: bool,
    pub src_lang: Language,
    pub tgt_lang: Language,
    pub thresholds: ConformityThresholds,
    pub aggregation: LengthAggregation,
    pub timing: TimingChoice,
    pub skip_segmentation: bool,
    pub pos_captions: Option<PathBuf>,
    pub pos_subtitles: Option<PathBuf>,
    pub pos_format: PosFormat,
    pub chunk_chink_table: Option<PathBuf>,
    pub breaks: BreakSelection,
    pub exclude_trailing_eob: bool,
    pub break_order: BreakDirection,
    pub align_c2s: Option<PathBuf>,
    pub align_s2c: Option<PathBuf>,
    pub train_bitext: Option<PathBuf>,
    pub extra_bitext: Option<PathBuf>,
    pub aligner: AlignerConfig,
    pub skip_unaligned: bool,
    pub seed: u64,
    pub out: OutputKind,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            system_name: "system".into(),
            captions_hyp: None,
            captions_ref: None,
            subtitles_hyp: None,
            subtitles_ref: None,
            format: InputFormat::MustCinema,
            grouping_captions_hyp: None,
            grouping_captions_ref: None,
            grouping_subtitles_hyp: None,
            grouping_subtitles_ref: None,
            lenient: false,
            src_lang: Language::English,
            tgt_lang: Language::French,
            thresholds: ConformityThresholds::default(),
            aggregation: LengthAggregation::PerLine,
            timing: TimingChoice::Auto,
            skip_segmentation: false,
            pos_captions: None,
            pos_subtitles: None,
            pos_format: PosFormat::Conllu,
            chunk_chink_table: None,
            breaks: BreakSelection::Both,
            exclude_trailing_eob: false,
            break_order: BreakDirection::ContentThenFunction,
            align_c2s: None,
            align_s2c: None,
            train_bitext: None,
            extra_bitext: None,
            aligner: AlignerConfig::default(),
            skip_unaligned: false,
            seed: 42,
            out: OutputKind::Json,
        }
    }
}

fn usage(msg: impl fmt::Display) -> UsageError {
    UsageError(msg.to_string())
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, UsageError> {
    value.parse().map_err(|_| usage(format!("{key}: invalid value {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, UsageError> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(usage(format!("{key}: expected true or false, got {value:?}"))),
    }
}

fn parse_lang(key: &str, value: &str) -> Result<Language, UsageError> {
    let lang: Language = value.parse().unwrap_or(Language::Other);
    if lang == Language::Other && value != Language::Other.code() {
        // unknown codes are accepted and tokenized without apostrophe rules
        log::info!("{key}: language {value:?} has no specific tokenization rules");
    }
    Ok(lang)
}

fn choice<T: Copy>(key: &str, value: &str, options: &[(&str, T)]) -> Result<T, UsageError> {
    options.iter().find(|(name, _)| *name == value).map(|&(_, v)| v).ok_or_else(|| {
        let names: Vec<_> = options.iter().map(|(n, _)| *n).collect();
        usage(format!("{key}: expected one of {}, got {value:?}", names.join("|")))
    })
}

fn path_str(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), UsageError> {
        // an empty value clears a path set earlier, e.g. by a config file
        let path = || (!value.is_empty()).then(|| PathBuf::from(value));
        match key {
            "system-name" => self.system_name = value.to_string(),
            "captions-hyp" => self.captions_hyp = path(),
            "captions-ref" => self.captions_ref = path(),
            "subtitles-hyp" => self.subtitles_hyp = path(),
            "subtitles-ref" => self.subtitles_ref = path(),
            "format" => {
                self.format = choice(key, value, &[("mustcinema", InputFormat::MustCinema), ("srt", InputFormat::Srt)])?
            }
            "grouping-captions-hyp" => self.grouping_captions_hyp = path(),
            "grouping-captions-ref" => self.grouping_captions_ref = path(),
            "grouping-subtitles-hyp" => self.grouping_subtitles_hyp = path(),
            "grouping-subtitles-ref" => self.grouping_subtitles_ref = path(),
            "lenient" => self.lenient = parse_bool(key, value)?,
            "src-lang" => self.src_lang = parse_lang(key, value)?,
            "tgt-lang" => self.tgt_lang = parse_lang(key, value)?,
            "max-cpl" => {
                self.thresholds = ConformityThresholds::new(parse(key, value)?, self.thresholds.max_cps).map_err(usage)?
            }
            "max-cps" => {
                self.thresholds = ConformityThresholds::new(self.thresholds.max_cpl, parse(key, value)?).map_err(usage)?
            }
            "aggregation" => self.aggregation = value.parse().map_err(|e: String| usage(format!("{key}: {e}")))?,
            "timing" => {
                self.timing = choice(
                    key,
                    value,
                    &[
                        ("auto", TimingChoice::Auto),
                        ("block", TimingChoice::Block),
                        ("utterance", TimingChoice::Utterance),
                    ],
                )?
            }
            "skip-segmentation" => self.skip_segmentation = parse_bool(key, value)?,
            "pos-captions" => self.pos_captions = path(),
            "pos-subtitles" => self.pos_subtitles = path(),
            "pos-format" => {
                self.pos_format = choice(key, value, &[("conllu", PosFormat::Conllu), ("lexicon", PosFormat::Lexicon)])?
            }
            "chunk-chink-table" => self.chunk_chink_table = path(),
            "breaks" => self.breaks = value.parse().map_err(|e: String| usage(format!("{key}: {e}")))?,
            "exclude-trailing-eob" => self.exclude_trailing_eob = parse_bool(key, value)?,
            "break-order" => {
                self.break_order = choice(
                    key,
                    value,
                    &[
                        ("content-function", BreakDirection::ContentThenFunction),
                        ("either", BreakDirection::EitherOrder),
                    ],
                )?
            }
            "align-c2s" => self.align_c2s = path(),
            "align-s2c" => self.align_s2c = path(),
            "train-bitext" => self.train_bitext = path(),
            "extra-bitext" => self.extra_bitext = path(),
            "iterations" => self.aligner.iterations = parse(key, value)?,
            "null-prob" => self.aligner.null_prob = parse(key, value)?,
            "tension" => self.aligner.initial_tension = parse(key, value)?,
            "diagonal" => self.aligner.use_diagonal_prior = parse_bool(key, value)?,
            "optimize-tension" => self.aligner.optimize_tension = parse_bool(key, value)?,
            "skip-unaligned" => self.skip_unaligned = parse_bool(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "out" => {
                self.out = choice(
                    key,
                    value,
                    &[("json", OutputKind::Json), ("tsv", OutputKind::Tsv), ("both", OutputKind::Both)],
                )?
            }
            _ => return Err(usage(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    /// Resolved `(key, value)` pairs in [`KEYS`] order; unset paths are omitted.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let a = &self.aligner;
        let values: Vec<(&'static str, Option<String>)> = vec![
            ("system-name", Some(self.system_name.clone())),
            ("captions-hyp", path_str(&self.captions_hyp)),
            ("captions-ref", path_str(&self.captions_ref)),
            ("subtitles-hyp", path_str(&self.subtitles_hyp)),
            ("subtitles-ref", path_str(&self.subtitles_ref)),
            (
                "format",
                Some(match self.format {
                    InputFormat::MustCinema => "mustcinema".into(),
                    InputFormat::Srt => "srt".into(),
                }),
            ),
            ("grouping-captions-hyp", path_str(&self.grouping_captions_hyp)),
            ("grouping-captions-ref", path_str(&self.grouping_captions_ref)),
            ("grouping-subtitles-hyp", path_str(&self.grouping_subtitles_hyp)),
            ("grouping-subtitles-ref", path_str(&self.grouping_subtitles_ref)),
            ("lenient", Some(self.lenient.to_string())),
            ("src-lang", Some(self.src_lang.code().into())),
            ("tgt-lang", Some(self.tgt_lang.code().into())),
            ("max-cpl", Some(self.thresholds.max_cpl.to_string())),
            ("max-cps", Some(self.thresholds.max_cps.to_string())),
            (
                "aggregation",
                Some(match self.aggregation {
                    LengthAggregation::PerLine => "line".into(),
                    LengthAggregation::PerBlock => "block".into(),
                }),
            ),
            (
                "timing",
                Some(match self.timing {
                    TimingChoice::Auto => "auto".into(),
                    TimingChoice::Block => "block".into(),
                    TimingChoice::Utterance => "utterance".into(),
                }),
            ),
            ("skip-segmentation", Some(self.skip_segmentation.to_string())),
            ("pos-captions", path_str(&self.pos_captions)),
            ("pos-subtitles", path_str(&self.pos_subtitles)),
            (
                "pos-format",
                Some(match self.pos_format {
                    PosFormat::Conllu => "conllu".into(),
                    PosFormat::Lexicon => "lexicon".into(),
                }),
            ),
            ("chunk-chink-table", path_str(&self.chunk_chink_table)),
            (
                "breaks",
                Some(match self.breaks {
                    BreakSelection::Eol => "eol".into(),
                    BreakSelection::Eob => "eob".into(),
                    BreakSelection::Both => "both".into(),
                }),
            ),
            ("exclude-trailing-eob", Some(self.exclude_trailing_eob.to_string())),
            (
                "break-order",
                Some(match self.break_order {
                    BreakDirection::ContentThenFunction => "content-function".into(),
                    BreakDirection::EitherOrder => "either".into(),
                }),
            ),
            ("align-c2s", path_str(&self.align_c2s)),
            ("align-s2c", path_str(&self.align_s2c)),
            ("train-bitext", path_str(&self.train_bitext)),
            ("extra-bitext", path_str(&self.extra_bitext)),
            ("iterations", Some(a.iterations.to_string())),
            ("null-prob", Some(a.null_prob.to_string())),
            ("tension", Some(a.initial_tension.to_string())),
            ("diagonal", Some(a.use_diagonal_prior.to_string())),
            ("optimize-tension", Some(a.optimize_tension.to_string())),
            ("skip-unaligned", Some(self.skip_unaligned.to_string())),
            ("seed", Some(self.seed.to_string())),
            (
                "out",
                Some(match self.out {
                    OutputKind::Json => "json".into(),
                    OutputKind::Tsv => "tsv".into(),
                    OutputKind::Both => "both".into(),
                }),
            ),
        ];
        values.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect()
    }

    /// The configuration as a file that `--config` reads back unchanged.
    pub fn to_config_text(&self) -> String {
        self.entries().into_iter().map(|(k, v)| format!("{k} {v}\n")).collect()
    }

    /// Applies a configuration file. Blank lines and `#` comments are
    /// ignored; each other line is `key value` (value may contain spaces).
    pub fn apply_file(&mut self, text: &str) -> Result<(), UsageError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = match line.split_once(char::is_whitespace) {
                Some((k, v)) => (k, v.trim()),
                None => return Err(usage(format!("config line {}: expected `key value`", n + 1))),
            };
            self.set(key, value).map_err(|e| usage(format!("config line {}: {}", n + 1, e.0)))?;
        }
        Ok(())
    }

    pub fn referenced_paths(&self) -> Vec<(&'static str, &Path)> {
        let all = [
            ("captions-hyp", &self.captions_hyp),
            ("captions-ref", &self.captions_ref),
            ("subtitles-hyp", &self.subtitles_hyp),
            ("subtitles-ref", &self.subtitles_ref),
            ("grouping-captions-hyp", &self.grouping_captions_hyp),
            ("grouping-captions-ref", &self.grouping_captions_ref),
            ("grouping-subtitles-hyp", &self.grouping_subtitles_hyp),
            ("grouping-subtitles-ref", &self.grouping_subtitles_ref),
            ("pos-captions", &self.pos_captions),
            ("pos-subtitles", &self.pos_subtitles),
            ("chunk-chink-table", &self.chunk_chink_table),
            ("align-c2s", &self.align_c2s),
            ("align-s2c", &self.align_s2c),
            ("train-bitext", &self.train_bitext),
            ("extra-bitext", &self.extra_bitext),
        ];
        all.into_iter().filter_map(|(k, p)| p.as_deref().map(|p| (k, p))).collect()
    }

    /// Checks cross-key requirements that do not need file contents.
    pub fn check(&self) -> Result<(), UsageError> {
        if self.captions_hyp.is_none() || self.subtitles_hyp.is_none() {
            return Err(usage("captions-hyp and subtitles-hyp are required"));
        }
        if self.align_c2s.is_some() != self.align_s2c.is_some() {
            return Err(usage("align-c2s and align-s2c must be given together"));
        }
        self.aligner.validate().map_err(usage)?;
        Ok(())
    }
}
