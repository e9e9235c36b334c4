//! Block-structured subtitle text.
//!
//! An [`Utterance`] is an ordered list of [`SubtitleBlock`]s, each holding one
//! or more [`SubtitleLine`]s. In the inline-marker format blocks are closed by
//! `<eob>` and lines inside a block are separated by `<eol>`.

pub(crate) mod marked;
mod srt;

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use marked::{parse_marked_text, parse_marked_text_with, serialize_marked_text, MarkedTextOptions};
pub use srt::{format_timestamp, parse_srt, serialize_srt, GroupingMap};

pub const BLOCK_BREAK: &str = "<eob>";
pub const LINE_BREAK: &str = "<eol>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BreakKind {
    Block,
    Line,
}

impl BreakKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BreakKind::Block => BLOCK_BREAK,
            BreakKind::Line => LINE_BREAK,
        }
    }

    /// Recognizes the exact break literal.
    pub fn from_literal(s: &str) -> Option<Self> {
        match s {
            BLOCK_BREAK => Some(BreakKind::Block),
            LINE_BREAK => Some(BreakKind::Line),
            _ => None,
        }
    }
}

impl fmt::Display for BreakKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A half-open display interval in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Timing {
    start_ms: u64,
    end_ms: u64,
}

impl Timing {
    pub fn new(start_ms: u64, end_ms: u64) -> Result<Self> {
        if end_ms <= start_ms {
            return Err(Error::InvalidTiming { start_ms, end_ms });
        }
        Ok(Timing { start_ms, end_ms })
    }

    pub fn start_ms(&self) -> u64 {
        self.start_ms
    }

    pub fn end_ms(&self) -> u64 {
        self.end_ms
    }

    pub fn duration_ms(&self) -> u64 {
        self.end_ms - self.start_ms
    }

    pub fn contains(&self, other: &Timing) -> bool {
        self.start_ms <= other.start_ms && other.end_ms <= self.end_ms
    }
}

/// One physical row of subtitle text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SubtitleLine(String);

impl SubtitleLine {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        let reason = if text.trim().is_empty() {
            Some("line is empty")
        } else if text.contains('\n') || text.contains('\r') {
            Some("line contains a newline")
        } else if text.contains(BLOCK_BREAK) || text.contains(LINE_BREAK) {
            Some("line contains a break token")
        } else {
            None
        };
        match reason {
            Some(reason) => Err(Error::InvalidLine { text, reason }),
            None => Ok(SubtitleLine(text)),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Unicode scalar count of the trimmed line.
    pub fn char_count(&self) -> usize {
        self.0.trim().chars().count()
    }
}

impl TryFrom<String> for SubtitleLine {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        SubtitleLine::new(value)
    }
}

impl From<SubtitleLine> for String {
    fn from(line: SubtitleLine) -> String {
        line.0
    }
}

impl fmt::Display for SubtitleLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtitleBlock {
    lines: Vec<SubtitleLine>,
    timing: Option<Timing>,
}

impl SubtitleBlock {
    pub fn new(lines: Vec<SubtitleLine>, timing: Option<Timing>) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::EmptyBlock);
        }
        Ok(SubtitleBlock { lines, timing })
    }

    /// Convenience constructor from raw line strings, without timing.
    pub fn from_lines<S: AsRef<str>>(lines: &[S]) -> Result<Self> {
        let lines = lines
            .iter()
            .map(|l| SubtitleLine::new(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        SubtitleBlock::new(lines, None)
    }

    pub fn lines(&self) -> &[SubtitleLine] {
        &self.lines
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn timing(&self) -> Option<Timing> {
        self.timing
    }

    /// Total on-screen characters: sum of the per-line counts.
    pub fn char_total(&self) -> usize {
        block_char_count(self).iter().sum()
    }
}

/// Per-line character counts: Unicode scalars of the trimmed line, inner
/// spaces and punctuation included.
pub fn block_char_count(block: &SubtitleBlock) -> Vec<usize> {
    block.lines.iter().map(SubtitleLine::char_count).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    id: String,
    blocks: Vec<SubtitleBlock>,
    timing: Option<Timing>,
}

impl Utterance {
    pub fn new(id: impl Into<String>, blocks: Vec<SubtitleBlock>, timing: Option<Timing>) -> Result<Self> {
        let id = id.into();
        if blocks.is_empty() {
            return Err(Error::NoBlocks { id });
        }
        if let Some(outer) = timing {
            let escapes = blocks
                .iter()
                .filter_map(SubtitleBlock::timing)
                .any(|inner| !outer.contains(&inner));
            if escapes {
                return Err(Error::BlockOutsideUtterance { id });
            }
        }
        Ok(Utterance { id, blocks, timing })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn blocks(&self) -> &[SubtitleBlock] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn line_count(&self) -> usize {
        self.blocks.iter().map(SubtitleBlock::line_count).sum()
    }

    pub fn timing(&self) -> Option<Timing> {
        self.timing
    }

    pub fn lines(&self) -> impl Iterator<Item = &SubtitleLine> {
        self.blocks.iter().flat_map(|b| b.lines.iter())
    }

    pub fn char_total(&self) -> usize {
        self.blocks.iter().map(SubtitleBlock::char_total).sum()
    }

    /// Canonical inline-marker form, always closed by a trailing `<eob>`.
    pub fn marked_text(&self) -> String {
        let mut out = String::new();
        for (b, block) in self.blocks.iter().enumerate() {
            if b > 0 {
                out.push(' ');
            }
            for (l, line) in block.lines.iter().enumerate() {
                if l > 0 {
                    out.push(' ');
                    out.push_str(LINE_BREAK);
                    out.push(' ');
                }
                out.push_str(line.as_str());
            }
            out.push(' ');
            out.push_str(BLOCK_BREAK);
        }
        out
    }

    /// Lines joined by single spaces, without break tokens.
    pub fn plain_text(&self) -> String {
        self.lines().map(SubtitleLine::as_str).collect::<Vec<_>>().join(" ")
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UtterancePair {
    caption: Utterance,
    subtitle: Utterance,
}

impl UtterancePair {
    pub fn new(caption: Utterance, subtitle: Utterance) -> Result<Self> {
        if caption.id != subtitle.id {
            return Err(Error::UtteranceIdMismatch {
                caption: caption.id,
                subtitle: subtitle.id,
            });
        }
        Ok(UtterancePair { caption, subtitle })
    }

    pub fn id(&self) -> &str {
        &self.caption.id
    }

    pub fn caption(&self) -> &Utterance {
        &self.caption
    }

    pub fn subtitle(&self) -> &Utterance {
        &self.subtitle
    }

    pub fn same_block_count(&self) -> bool {
        self.caption.block_count() == self.subtitle.block_count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocumentFormat {
    MarkedText,
    Srt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtitleDocument {
    utterances: Vec<Utterance>,
    format: DocumentFormat,
}

impl SubtitleDocument {
    pub fn new(utterances: Vec<Utterance>, format: DocumentFormat) -> Result<Self> {
        let mut seen = HashSet::with_capacity(utterances.len());
        for u in &utterances {
            if !seen.insert(u.id.as_str()) {
                return Err(Error::DuplicateId { id: u.id.clone() });
            }
        }
        Ok(SubtitleDocument { utterances, format })
    }

    pub fn utterances(&self) -> &[Utterance] {
        &self.utterances
    }

    pub fn into_utterances(self) -> Vec<Utterance> {
        self.utterances
    }

    pub fn format(&self) -> DocumentFormat {
        self.format
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }
}

/// Pairs caption and subtitle utterances.
///
/// Pairing is positional when the ids agree position by position; otherwise
/// subtitles are looked up by caption id.
pub fn pair_documents(captions: &SubtitleDocument, subtitles: &SubtitleDocument) -> Result<Vec<UtterancePair>> {
    let (c, s) = (captions.utterances(), subtitles.utterances());
    if c.len() != s.len() {
        return Err(Error::UtteranceCountMismatch(c.len(), s.len()));
    }
    if c.iter().zip(s).all(|(a, b)| a.id == b.id) {
        return c
            .iter()
            .zip(s)
            .map(|(a, b)| UtterancePair::new(a.clone(), b.clone()))
            .collect();
    }
    let by_id: HashMap<&str, &Utterance> = s.iter().map(|u| (u.id(), u)).collect();
    c.iter()
        .enumerate()
        .map(|(i, cap)| match by_id.get(cap.id()) {
            Some(sub) => UtterancePair::new(cap.clone(), (*sub).clone()),
            None => Err(Error::UtteranceIdMismatch {
                caption: cap.id.clone(),
                subtitle: s[i].id.clone(),
            }),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn utt(id: &str, blocks: &[&[&str]]) -> Utterance {
        let blocks = blocks.iter().map(|b| SubtitleBlock::from_lines(b).unwrap()).collect();
        Utterance::new(id, blocks, None).unwrap()
    }

    #[test]
    fn char_count_uses_scalars_and_trims() {
        let block = SubtitleBlock::from_lines(&["and so has democracy.", "a", "héllo", "  padded  "]).unwrap();
        assert_eq!(block_char_count(&block), vec![21, 1, 5, 6]);
    }

    #[test]
    fn line_rejects_break_literals_and_newlines() {
        assert!(SubtitleLine::new("a <eob> b").is_err());
        assert!(SubtitleLine::new("a<eol>").is_err());
        assert!(SubtitleLine::new("a\nb").is_err());
        assert!(SubtitleLine::new("   ").is_err());
    }

    #[test]
    fn timing_must_be_positive() {
        assert!(Timing::new(5000, 5000).is_err());
        assert!(Timing::new(5000, 4000).is_err());
        assert_eq!(Timing::new(50820, 53820).unwrap().duration_ms(), 3000);
    }

    #[test]
    fn block_timing_inside_utterance() {
        let inner = SubtitleBlock::new(vec![SubtitleLine::new("x").unwrap()], Some(Timing::new(10, 20).unwrap())).unwrap();
        assert!(Utterance::new("0", vec![inner.clone()], Some(Timing::new(0, 30).unwrap())).is_ok());
        assert!(Utterance::new("0", vec![inner], Some(Timing::new(15, 30).unwrap())).is_err());
    }

    #[test]
    fn pairing_counts() {
        let make = |n: usize| {
            let utts = (0..n).map(|i| utt(&i.to_string(), &[&["x"]])).collect();
            SubtitleDocument::new(utts, DocumentFormat::MarkedText).unwrap()
        };
        assert_eq!(pair_documents(&make(3), &make(3)).unwrap().len(), 3);
        let err = pair_documents(&make(3), &make(4)).unwrap_err();
        assert_eq!(err.to_string(), "utterance count mismatch: 3 vs 4");
        assert!(pair_documents(&make(0), &make(0)).unwrap().is_empty());
    }

    #[test]
    fn pairing_falls_back_to_ids() {
        let caps = SubtitleDocument::new(vec![utt("a", &[&["x"]]), utt("b", &[&["y"]])], DocumentFormat::Srt).unwrap();
        let subs = SubtitleDocument::new(vec![utt("b", &[&["Y"]]), utt("a", &[&["X"]])], DocumentFormat::Srt).unwrap();
        let pairs = pair_documents(&caps, &subs).unwrap();
        assert_eq!(pairs[0].subtitle().plain_text(), "X");
        assert_eq!(pairs[1].subtitle().plain_text(), "Y");

        let other = SubtitleDocument::new(vec![utt("c", &[&["Y"]]), utt("a", &[&["X"]])], DocumentFormat::Srt).unwrap();
        assert!(matches!(pair_documents(&caps, &other), Err(Error::UtteranceIdMismatch { .. })));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let r = SubtitleDocument::new(vec![utt("a", &[&["x"]]), utt("a", &[&["y"]])], DocumentFormat::MarkedText);
        assert!(matches!(r, Err(Error::DuplicateId { .. })));
    }

    #[test]
    fn marked_text_form() {
        let u = utt("0", &[&["Hello there", "my friend"], &["Goodbye."]]);
        assert_eq!(u.marked_text(), "Hello there <eol> my friend <eob> Goodbye. <eob>");
        assert_eq!(u.plain_text(), "Hello there my friend Goodbye.");
    }
}
