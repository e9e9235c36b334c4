//! Conformity to subtitling constraints: characters per line, characters per
//! second and plausibility of break placement.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subtitle::{BreakKind, Utterance};
use crate::text::{ChunkChinkTable, TaggedUtterance, WordClass};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformityThresholds {
    pub max_cpl: usize,
    pub max_cps: f64,
}

impl Default for ConformityThresholds {
    fn default() -> Self {
        ConformityThresholds {
            max_cpl: 42,
            max_cps: 21.0,
        }
    }
}

impl ConformityThresholds {
    pub fn new(max_cpl: usize, max_cps: f64) -> Result<Self> {
        if max_cpl == 0 {
            return Err(Error::InvalidThresholds("max_cpl must be positive".into()));
        }
        if !(max_cps.is_finite() && max_cps > 0.0) {
            return Err(Error::InvalidThresholds("max_cps must be positive".into()));
        }
        Ok(ConformityThresholds { max_cpl, max_cps })
    }
}

/// A conforming count over a denominator. The rate is absent when nothing
/// was counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rate {
    pub conforming: usize,
    pub total: usize,
}

impl Rate {
    pub fn new(conforming: usize, total: usize) -> Self {
        debug_assert!(conforming <= total);
        Rate { conforming, total }
    }

    pub fn value(&self) -> Option<f64> {
        (self.total > 0).then(|| self.conforming as f64 / self.total as f64)
    }

    fn tally(&mut self, ok: bool) {
        self.total += 1;
        self.conforming += usize::from(ok);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthAggregation {
    #[serde(rename = "line")]
    PerLine,
    #[serde(rename = "block")]
    PerBlock,
}

impl FromStr for LengthAggregation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "line" => Ok(LengthAggregation::PerLine),
            "block" => Ok(LengthAggregation::PerBlock),
            other => Err(format!("unknown aggregation {other:?} (expected line or block)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimingMode {
    #[serde(rename = "block")]
    PerBlock,
    #[serde(rename = "utterance")]
    PerUtterance,
}

impl TimingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TimingMode::PerBlock => "block",
            TimingMode::PerUtterance => "utterance",
        }
    }
}

/// Fraction of lines (or blocks whose every line) fit in `max_cpl` characters.
pub fn length_conformity(utterances: &[Utterance], thresholds: &ConformityThresholds, aggregation: LengthAggregation) -> Rate {
    let mut rate = Rate::default();
    for block in utterances.iter().flat_map(Utterance::blocks) {
        let mut fits = block.lines().iter().map(|l| l.char_count() <= thresholds.max_cpl);
        match aggregation {
            LengthAggregation::PerLine => fits.for_each(|ok| rate.tally(ok)),
            LengthAggregation::PerBlock => rate.tally(fits.all(|ok| ok)),
        }
    }
    rate
}

/// Per-block timing when every block is timed, else per-utterance timing
/// when every utterance is timed.
pub fn default_timing_mode(utterances: &[Utterance]) -> Option<TimingMode> {
    let blocks_timed = utterances.iter().flat_map(Utterance::blocks).all(|b| b.timing().is_some());
    if blocks_timed && !utterances.is_empty() {
        Some(TimingMode::PerBlock)
    } else if !utterances.is_empty() && utterances.iter().all(|u| u.timing().is_some()) {
        Some(TimingMode::PerUtterance)
    } else {
        None
    }
}

fn within_cps(chars: usize, duration_ms: u64, max_cps: f64) -> bool {
    // chars / (ms / 1000) <= max  <=>  chars * 1000 <= max * ms
    chars as f64 * 1000.0 <= max_cps * duration_ms as f64
}

/// Fraction of timed units read at no more than `max_cps` characters per
/// second. Characters are summed over lines without inter-line spaces.
pub fn reading_speed_conformity(
    utterances: &[Utterance],
    thresholds: &ConformityThresholds,
    mode: TimingMode,
) -> Result<Rate> {
    let mut rate = Rate::default();
    match mode {
        TimingMode::PerBlock => {
            for block in utterances.iter().flat_map(Utterance::blocks) {
                let timing = block.timing().ok_or(Error::TimingUnavailable { mode: mode.as_str() })?;
                rate.tally(within_cps(block.char_total(), timing.duration_ms(), thresholds.max_cps));
            }
        }
        TimingMode::PerUtterance => {
            for u in utterances {
                let timing = u.timing().ok_or(Error::TimingUnavailable { mode: mode.as_str() })?;
                rate.tally(within_cps(u.char_total(), timing.duration_ms(), thresholds.max_cps));
            }
        }
    }
    Ok(rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BreakDirection {
    /// Content word before the break, function word after it.
    ContentThenFunction,
    /// Either order of content and function word.
    EitherOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BreakSelection {
    Eol,
    Eob,
    Both,
}

impl BreakSelection {
    pub fn includes(self, kind: BreakKind) -> bool {
        match self {
            BreakSelection::Both => true,
            BreakSelection::Eol => kind == BreakKind::Line,
            BreakSelection::Eob => kind == BreakKind::Block,
        }
    }
}

impl FromStr for BreakSelection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "eol" => Ok(BreakSelection::Eol),
            "eob" => Ok(BreakSelection::Eob),
            "both" => Ok(BreakSelection::Both),
            other => Err(format!("unknown break selection {other:?} (expected eol, eob or both)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SegmentationOptions {
    pub include_trailing_eob: bool,
    pub direction: BreakDirection,
    pub breaks: BreakSelection,
    pub classes: ChunkChinkTable,
}

impl Default for SegmentationOptions {
    fn default() -> Self {
        SegmentationOptions {
            include_trailing_eob: true,
            direction: BreakDirection::ContentThenFunction,
            breaks: BreakSelection::Both,
            classes: ChunkChinkTable::default(),
        }
    }
}

/// Fraction of counted breaks that follow punctuation or sit between a
/// content word and a function word.
///
/// A break with no word after it is utterance-final: it is only counted
/// when `include_trailing_eob` is set, and is plausible iff it follows
/// punctuation.
pub fn segmentation_plausibility(tagged: &[TaggedUtterance], options: &SegmentationOptions) -> Result<Rate> {
    let mut rate = Rate::default();
    for utt in tagged {
        let items = &utt.items;
        let class_at = |idx: usize| -> Result<WordClass> {
            let tag = items[idx].1.ok_or_else(|| Error::UntaggedToken {
                id: utt.id.clone(),
                index: idx,
            })?;
            Ok(options.classes.classify(tag))
        };
        for (pos, (token, _)) in items.iter().enumerate() {
            let Some(kind) = token.break_kind() else { continue };
            if !options.breaks.includes(kind) {
                continue;
            }
            let prev = items[..pos].iter().rposition(|(t, _)| !t.is_break());
            let next = items[pos + 1..].iter().position(|(t, _)| !t.is_break()).map(|k| pos + 1 + k);
            let prev_class = prev.map(class_at).transpose()?;
            let plausible = match next {
                None => {
                    if !options.include_trailing_eob {
                        continue;
                    }
                    prev_class == Some(WordClass::Punct)
                }
                Some(next) => {
                    let next_class = class_at(next)?;
                    match prev_class {
                        Some(WordClass::Punct) => true,
                        Some(WordClass::Content) => next_class == WordClass::Function,
                        Some(WordClass::Function) => {
                            options.direction == BreakDirection::EitherOrder && next_class == WordClass::Content
                        }
                        None => false,
                    }
                }
            };
            rate.tally(plausible);
        }
    }
    Ok(rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformityReport {
    pub length: Rate,
    pub reading_speed: Option<Rate>,
    pub segmentation: Option<Rate>,
}
