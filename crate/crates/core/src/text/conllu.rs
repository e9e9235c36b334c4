use super::UposTag;
use crate::error::{Error, Result};

/// (FORM, UPOS) pairs of one sentence.
pub type TagSequence = Vec<(String, UposTag)>;

/// Reads FORM and UPOS from CoNLL-U. Multiword ranges (`3-4`) and empty nodes
/// (`5.1`) are skipped; comment lines are ignored.
pub fn parse_conllu(input: &str) -> Result<Vec<TagSequence>> {
    let input = input.strip_prefix('\u{feff}').unwrap_or(input);
    let mut sentences = Vec::new();
    let mut current: TagSequence = Vec::new();
    for (n, raw) in input.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::MalformedConllu {
                line: line_no,
                message: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            continue;
        }
        if id.parse::<u32>().is_err() {
            return Err(Error::MalformedConllu {
                line: line_no,
                message: format!("bad token id {id:?}"),
            });
        }
        let upos = cols[3].parse::<UposTag>().map_err(|_| Error::UnknownUpos {
            tag: cols[3].to_string(),
            line: line_no,
        })?;
        current.push((cols[1].to_string(), upos));
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}
