//! SubRip parsing and serialization.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use super::{DocumentFormat, SubtitleBlock, SubtitleDocument, SubtitleLine, Timing, Utterance};
use crate::error::{Error, Result};

/// Utterance id → ordered cue indices, read from a two-column TSV.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupingMap {
    groups: Vec<(String, Vec<u64>)>,
}

impl GroupingMap {
    pub fn new(groups: Vec<(String, Vec<u64>)>) -> Self {
        GroupingMap { groups }
    }

    /// Parses `utterance_id<TAB>1,2,3` rows. Blank lines and `#` comments are skipped.
    pub fn parse(input: &str) -> Result<Self> {
        let mut groups = Vec::new();
        for (n, raw) in input.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |message: String| Error::MalformedGrouping { line: n + 1, message };
            let (id, cues) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected two tab-separated columns".into()))?;
            let cues = cues
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<u64>()
                        .map_err(|_| malformed(format!("bad cue index {c:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            groups.push((id.trim().to_string(), cues));
        }
        Ok(GroupingMap { groups })
    }

    pub fn groups(&self) -> &[(String, Vec<u64>)] {
        &self.groups
    }
}

struct Cue {
    index: u64,
    block: SubtitleBlock,
}

/// Parses SubRip text. Without a grouping map every cue becomes a
/// single-block utterance whose id is the cue index.
pub fn parse_srt(input: &str, grouping: Option<&GroupingMap>) -> Result<SubtitleDocument> {
    let cues = parse_cues(input)?;
    let utterances = match grouping {
        None => cues
            .into_iter()
            .map(|cue| {
                let timing = cue.block.timing();
                Utterance::new(cue.index.to_string(), vec![cue.block], timing)
            })
            .collect::<Result<Vec<_>>>()?,
        Some(map) => group_cues(cues, map)?,
    };
    SubtitleDocument::new(utterances, DocumentFormat::Srt)
}

fn group_cues(cues: Vec<Cue>, map: &GroupingMap) -> Result<Vec<Utterance>> {
    let mut by_index: HashMap<u64, SubtitleBlock> = HashMap::with_capacity(cues.len());
    let order: Vec<u64> = cues.iter().map(|c| c.index).collect();
    for cue in cues {
        if by_index.insert(cue.index, cue.block).is_some() {
            return Err(Error::MalformedSrt {
                line: 0,
                message: format!("duplicate cue index {}", cue.index),
            });
        }
    }
    let mut used = HashSet::new();
    let mut utterances = Vec::with_capacity(map.groups.len());
    for (n, (id, indices)) in map.groups.iter().enumerate() {
        let mut blocks = Vec::with_capacity(indices.len());
        for idx in indices {
            if !used.insert(*idx) {
                return Err(Error::MalformedGrouping {
                    line: n + 1,
                    message: format!("cue {idx} assigned twice"),
                });
            }
            let block = by_index.get(idx).ok_or_else(|| Error::MalformedGrouping {
                line: n + 1,
                message: format!("cue {idx} not present in the SRT input"),
            })?;
            blocks.push(block.clone());
        }
        let start = blocks.iter().filter_map(|b| b.timing()).map(|t| t.start_ms()).min();
        let end = blocks.iter().filter_map(|b| b.timing()).map(|t| t.end_ms()).max();
        let timing = match (start, end) {
            (Some(s), Some(e)) => Some(Timing::new(s, e)?),
            _ => None,
        };
        utterances.push(Utterance::new(id.clone(), blocks, timing)?);
    }
    if let Some(missing) = order.iter().find(|i| !used.contains(i)) {
        return Err(Error::MalformedGrouping {
            line: 0,
            message: format!("cue {missing} not assigned to any utterance"),
        });
    }
    Ok(utterances)
}

fn parse_cues(input: &str) -> Result<Vec<Cue>> {
    let input = input.strip_prefix('\u{feff}').unwrap_or(input);
    let lines: Vec<&str> = input.split('\n').map(|l| l.trim_end_matches('\r')).collect();
    let mut cues = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        if lines[i].trim().is_empty() {
            i += 1;
            continue;
        }
        let index_line = lines[i].trim();
        let index: u64 = index_line.parse().map_err(|_| Error::MalformedSrt {
            line: i + 1,
            message: format!("expected cue index, found {index_line:?}"),
        })?;
        let cue = index.to_string();
        i += 1;
        let timing_line = lines.get(i).copied().unwrap_or("");
        let (start, end) = parse_timing_line(timing_line).ok_or_else(|| Error::MalformedTiming {
            cue: cue.clone(),
            line: timing_line.to_string(),
        })?;
        if end <= start {
            return Err(Error::NonPositiveDuration { cue });
        }
        i += 1;
        let mut text = Vec::new();
        while i < lines.len() && !lines[i].trim().is_empty() {
            text.push(SubtitleLine::new(lines[i].trim())?);
            i += 1;
        }
        if text.is_empty() {
            return Err(Error::MalformedSrt {
                line: i,
                message: format!("cue {cue} has no text"),
            });
        }
        let block = SubtitleBlock::new(text, Some(Timing::new(start, end)?))?;
        cues.push(Cue { index, block });
    }
    Ok(cues)
}

fn parse_timing_line(line: &str) -> Option<(u64, u64)> {
    let (left, right) = line.split_once("-->")?;
    let start = parse_timestamp(left.trim())?;
    // positional extensions ("X1:...") may follow the end stamp
    let end = parse_timestamp(right.split_whitespace().next()?)?;
    Some((start, end))
}

fn parse_timestamp(s: &str) -> Option<u64> {
    let (hms, millis) = s.split_once(',')?;
    let mut parts = hms.split(':');
    let (h, m, sec) = (parts.next()?, parts.next()?, parts.next()?);
    if parts.next().is_some() || m.len() != 2 || sec.len() != 2 || millis.len() != 3 || h.is_empty() {
        return None;
    }
    let digits = |x: &str| x.bytes().all(|b| b.is_ascii_digit());
    if !(digits(h) && digits(m) && digits(sec) && digits(millis)) {
        return None;
    }
    let (h, m, sec, ms): (u64, u64, u64, u64) = (h.parse().ok()?, m.parse().ok()?, sec.parse().ok()?, millis.parse().ok()?);
    if m >= 60 || sec >= 60 {
        return None;
    }
    Some(((h * 60 + m) * 60 + sec) * 1000 + ms)
}

/// `HH:MM:SS,mmm`
pub fn format_timestamp(ms: u64) -> String {
    let (h, rest) = (ms / 3_600_000, ms % 3_600_000);
    let (m, rest) = (rest / 60_000, rest % 60_000);
    let (s, millis) = (rest / 1000, rest % 1000);
    format!("{h:02}:{m:02}:{s:02},{millis:03}")
}

/// Writes every block as a cue, numbered from 1 in document order.
pub fn serialize_srt(doc: &SubtitleDocument) -> Result<String> {
    let mut out = String::new();
    let mut n = 0usize;
    for block in doc.utterances().iter().flat_map(|u| u.blocks()) {
        let timing = block.timing().ok_or(Error::TimingUnavailable { mode: "srt" })?;
        n += 1;
        if n > 1 {
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{n}\n{} --> {}",
            format_timestamp(timing.start_ms()),
            format_timestamp(timing.end_ms())
        );
        for line in block.lines() {
            out.push_str(line.as_str());
            out.push('\n');
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "1\n00:00:50,820 --> 00:00:53,820\nTo put the assumptions very clearly:\n\n2\n00:00:53,820 --> 00:00:57,820\ncapitalism, after 150 years,\nhas become acceptable,\n\n3\n00:00:58,820 --> 00:01:00,820\nand so has democracy.\n";

    #[test]
    fn cue_timing_and_lines() {
        let doc = parse_srt(EXAMPLE, None).unwrap();
        assert_eq!(doc.len(), 3);
        let first = &doc.utterances()[0].blocks()[0];
        let t = first.timing().unwrap();
        assert_eq!((t.start_ms(), t.end_ms()), (50820, 53820));
        assert_eq!(first.line_count(), 1);
        assert_eq!(doc.utterances()[1].blocks()[0].line_count(), 2);
        assert_eq!(doc.utterances()[2].id(), "3");
    }

    #[test]
    fn zero_duration_rejected() {
        let err = parse_srt("7\n00:00:05,000 --> 00:00:05,000\nx\n", None).unwrap_err();
        assert!(matches!(err, Error::NonPositiveDuration { ref cue } if cue == "7"));
        assert!(err.to_string().contains("non-positive duration"));
    }

    #[test]
    fn malformed_timing_names_cue() {
        for bad in ["00:00:05.000 --> 00:00:06,000", "00:00:05,000 -> 00:00:06,000", "00:61:05,000 --> 01:00:06,000", ""] {
            let input = format!("4\n{bad}\nx\n");
            let err = parse_srt(&input, None).unwrap_err();
            assert!(matches!(err, Error::MalformedTiming { ref cue, .. } if cue == "4"), "{bad}");
        }
    }

    #[test]
    fn bom_crlf_and_position_suffix() {
        let input = "\u{feff}1\r\n0:00:01,000 --> 0:00:02,500 X1:10 X2:20\r\nhi\r\n\r\n";
        let doc = parse_srt(input, None).unwrap();
        let t = doc.utterances()[0].timing().unwrap();
        assert_eq!((t.start_ms(), t.end_ms()), (1000, 2500));
    }

    #[test]
    fn timestamps_round_trip() {
        let doc = parse_srt(EXAMPLE, None).unwrap();
        let out = serialize_srt(&doc).unwrap();
        assert_eq!(out, EXAMPLE);
        assert_eq!(format_timestamp(50820), "00:00:50,820");
        assert_eq!(format_timestamp(100 * 3_600_000 + 1), "100:00:00,001");
    }

    #[test]
    fn grouping_builds_multi_block_utterances() {
        let map = GroupingMap::parse("talk_0\t1,2,3\n").unwrap();
        let doc = parse_srt(EXAMPLE, Some(&map)).unwrap();
        assert_eq!(doc.len(), 1);
        let u = &doc.utterances()[0];
        assert_eq!(u.id(), "talk_0");
        assert_eq!(u.block_count(), 3);
        let t = u.timing().unwrap();
        assert_eq!((t.start_ms(), t.end_ms()), (50820, 60820));
    }

    #[test]
    fn grouping_errors() {
        let missing = GroupingMap::parse("a\t1,2\n").unwrap();
        assert!(matches!(parse_srt(EXAMPLE, Some(&missing)), Err(Error::MalformedGrouping { .. })));
        let twice = GroupingMap::parse("a\t1,2\nb\t2,3\n").unwrap();
        assert!(matches!(parse_srt(EXAMPLE, Some(&twice)), Err(Error::MalformedGrouping { .. })));
        let unknown = GroupingMap::parse("a\t1,2,3,9\n").unwrap();
        assert!(matches!(parse_srt(EXAMPLE, Some(&unknown)), Err(Error::MalformedGrouping { .. })));
        assert!(GroupingMap::parse("a 1,2\n").is_err());
        assert!(GroupingMap::parse("a\t1,x\n").is_err());
    }
}
