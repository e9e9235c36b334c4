//! Inline-marker format: one utterance per physical line, `<eob>` closes a
//! block and `<eol>` separates lines inside a block.

use log::warn;

use super::{BreakKind, DocumentFormat, SubtitleBlock, SubtitleDocument, SubtitleLine, Utterance, BLOCK_BREAK, LINE_BREAK};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct MarkedTextOptions {
    /// Utterance ids, one per input line. Defaults to 0-based line numbers.
    pub ids: Option<Vec<String>>,
    /// Drop empty segments with a warning instead of failing.
    pub lenient: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Piece<'a> {
    Word(&'a str),
    Break(BreakKind),
}

/// Splits on whitespace and isolates break literals, including ones glued to
/// neighbouring words (`word<eob>`).
pub(crate) fn scan_pieces(text: &str) -> Vec<Piece<'_>> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        let mut rest = word;
        while !rest.is_empty() {
            let next = [BLOCK_BREAK, LINE_BREAK]
                .iter()
                .filter_map(|lit| rest.find(lit).map(|pos| (pos, *lit)))
                .min_by_key(|(pos, _)| *pos);
            match next {
                Some((pos, lit)) => {
                    if pos > 0 {
                        out.push(Piece::Word(&rest[..pos]));
                    }
                    out.push(Piece::Break(BreakKind::from_literal(lit).expect("literal")));
                    rest = &rest[pos + lit.len()..];
                }
                None => {
                    out.push(Piece::Word(rest));
                    rest = "";
                }
            }
        }
    }
    out
}

pub fn parse_marked_text(input: &str) -> Result<SubtitleDocument> {
    parse_marked_text_with(input, &MarkedTextOptions::default())
}

pub fn parse_marked_text_with(input: &str, options: &MarkedTextOptions) -> Result<SubtitleDocument> {
    let input = input.strip_prefix('\u{feff}').unwrap_or(input);
    let lines: Vec<&str> = input.lines().collect();
    if let Some(ids) = &options.ids {
        if ids.len() != lines.len() {
            return Err(Error::IdCountMismatch {
                ids: ids.len(),
                utterances: lines.len(),
            });
        }
    }
    let utterances = lines
        .iter()
        .enumerate()
        .map(|(index, line)| {
            let id = match &options.ids {
                Some(ids) => ids[index].clone(),
                None => index.to_string(),
            };
            parse_utterance(line, index, id, options.lenient)
        })
        .collect::<Result<Vec<_>>>()?;
    SubtitleDocument::new(utterances, DocumentFormat::MarkedText)
}

fn parse_utterance(text: &str, index: usize, id: String, lenient: bool) -> Result<Utterance> {
    let pieces = scan_pieces(text);
    if pieces.is_empty() {
        return Err(Error::EmptyUtterance { utterance: index });
    }

    let mut blocks = Vec::new();
    let mut lines: Vec<SubtitleLine> = Vec::new();
    let mut words: Vec<&str> = Vec::new();

    let empty_segment = |lenient: bool| -> Result<()> {
        if lenient {
            warn!("utterance {index}: dropping empty segment");
            Ok(())
        } else {
            Err(Error::EmptySegment { utterance: index })
        }
    };

    for piece in pieces {
        match piece {
            Piece::Word(w) => words.push(w),
            Piece::Break(kind) => {
                if words.is_empty() {
                    // "<eol> <eob>" after a complete line is also an empty line
                    empty_segment(lenient)?;
                    if kind == BreakKind::Block && !lines.is_empty() {
                        blocks.push(SubtitleBlock::new(std::mem::take(&mut lines), None)?);
                    }
                    continue;
                }
                lines.push(SubtitleLine::new(words.join(" "))?);
                words.clear();
                if kind == BreakKind::Block {
                    blocks.push(SubtitleBlock::new(std::mem::take(&mut lines), None)?);
                }
            }
        }
    }

    if !words.is_empty() {
        lines.push(SubtitleLine::new(words.join(" "))?);
    } else if !lines.is_empty() {
        // trailing <eol> without a following line
        empty_segment(lenient)?;
    }
    if !lines.is_empty() {
        blocks.push(SubtitleBlock::new(lines, None)?);
    }
    if blocks.is_empty() {
        return Err(Error::EmptyUtterance { utterance: index });
    }
    Utterance::new(id, blocks, None)
}

/// One utterance per line, each terminated by `<eob>` and a newline.
pub fn serialize_marked_text(doc: &SubtitleDocument) -> String {
    let mut out = String::new();
    for u in doc.utterances() {
        out.push_str(&u.marked_text());
        out.push('\n');
    }
    out
}
