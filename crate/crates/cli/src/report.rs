//! Evaluation report and its JSON / TSV renderings.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use subeval_core::conformity::Rate;
use subeval_core::consistency::LexicalConsistencyPair;
use subeval_core::quality::{BleuScore, WerBreakdown};

/// Headline reals are written with 4 decimals.
fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn ser_round<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round4(*x))
}

fn ser_round_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&round4(*v)),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SidePair<T> {
    pub captions: Option<T>,
    pub subtitles: Option<T>,
}

impl<T> SidePair<T> {
    pub fn new(captions: Option<T>, subtitles: Option<T>) -> Self {
        SidePair { captions, subtitles }
    }
}

fn ser_side<S: Serializer>(p: &SidePair<f64>, s: S) -> Result<S::Ok, S::Error> {
    SidePair::new(p.captions.map(round4), p.subtitles.map(round4)).serialize(s)
}

/// Counts behind the headline numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Details {
    pub utterances: usize,
    pub wer: Option<WerBreakdown>,
    pub bleu: Option<BleuScore>,
    pub length: SidePair<Rate>,
    pub reading_speed: SidePair<Rate>,
    pub segmentation: SidePair<Rate>,
    pub lexical_structurally_consistent: Option<f64>,
    pub line_count: Rate,
    pub alignment_source: String,
}

/// Quality, conformity and consistency columns in table order, then the
/// line-count and character-ratio extensions. Rates are fractions; WER and
/// BLEU are percentages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub system_name: String,
    #[serde(serialize_with = "ser_round_opt")]
    pub wer: Option<f64>,
    #[serde(serialize_with = "ser_round_opt")]
    pub bleu: Option<f64>,
    #[serde(serialize_with = "ser_side")]
    pub length: SidePair<f64>,
    #[serde(serialize_with = "ser_side")]
    pub reading_speed: SidePair<f64>,
    #[serde(serialize_with = "ser_side")]
    pub segmentation: SidePair<f64>,
    #[serde(serialize_with = "ser_round")]
    pub structural: f64,
    #[serde(serialize_with = "ser_round")]
    pub lexical: f64,
    #[serde(serialize_with = "ser_round_opt")]
    pub line_count: Option<f64>,
    #[serde(serialize_with = "ser_round")]
    pub char_ratio: f64,
    pub details: Details,
    pub config_echo: BTreeMap<String, String>,
}

pub const TSV_COLUMNS: [&str; 13] = [
    "system",
    "WER",
    "BLEU",
    "Length_c",
    "Length_s",
    "Read_speed_c",
    "Read_speed_s",
    "Segment_c",
    "Segment_s",
    "Struc",
    "Lex",
    "Line_count",
    "Char_ratio",
];

fn two_dp(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), |v| format!("{v:.2}"))
}

fn percent(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), |v| format!("{:.0}", v * 100.0))
}

impl EvaluationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Header and one row. Rates are whole percentages, WER, BLEU and the
    /// character ratio have two decimals, and missing values are `NA`.
    pub fn to_tsv(&self) -> String {
        let row = [
            self.system_name.replace(['\t', '\n'], " "),
            two_dp(self.wer),
            two_dp(self.bleu),
            percent(self.length.captions),
            percent(self.length.subtitles),
            percent(self.reading_speed.captions),
            percent(self.reading_speed.subtitles),
            percent(self.segmentation.captions),
            percent(self.segmentation.subtitles),
            percent(Some(self.structural)),
            percent(Some(self.lexical)),
            percent(self.line_count),
            two_dp(Some(self.char_ratio)),
        ];
        format!("{}\n{}\n", TSV_COLUMNS.join("\t"), row.join("\t"))
    }
}

/// One JSON object per line.
pub fn diagnostics_jsonl(per_pair: &[LexicalConsistencyPair]) -> String {
    per_pair
        .iter()
        .map(|p| serde_json::to_string(p).expect("diagnostics serialize") + "\n")
        .collect()
}
