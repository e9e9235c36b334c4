use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Word links `(source_index, target_index)`, 0-based.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SentenceAlignment {
    links: BTreeSet<(usize, usize)>,
}

impl SentenceAlignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, source: usize, target: usize) -> bool {
        self.links.insert((source, target))
    }

    pub fn contains(&self, source: usize, target: usize) -> bool {
        self.links.contains(&(source, target))
    }

    pub fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.links.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    /// Swaps the roles of source and target.
    pub fn transposed(&self) -> Self {
        self.links.iter().map(|&(s, t)| (t, s)).collect()
    }

    /// Checks every link against the token counts of the aligned pair.
    pub fn validate(&self, id: &str, source_len: usize, target_len: usize) -> Result<()> {
        match self.links.iter().find(|&&(s, t)| s >= source_len || t >= target_len) {
            Some(&(s, t)) => Err(Error::AlignmentOutOfBounds {
                id: id.to_string(),
                source_index: s,
                target_index: t,
                source_len,
                target_len,
            }),
            None => Ok(()),
        }
    }
}

impl FromIterator<(usize, usize)> for SentenceAlignment {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        SentenceAlignment {
            links: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for SentenceAlignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (s, t)) in self.links.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}-{t}")?;
        }
        Ok(())
    }
}

/// Parses one line of whitespace-separated `i-j` links. Columns in errors
/// are 1-based token positions.
pub fn parse_pharaoh(line: &str) -> Result<SentenceAlignment> {
    let mut alignment = SentenceAlignment::new();
    for (k, token) in line.split_whitespace().enumerate() {
        let malformed = || Error::MalformedPharaoh {
            column: k + 1,
            token: token.to_string(),
        };
        let (s, t) = token.split_once('-').ok_or_else(malformed)?;
        let digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
        if !digits(s) || !digits(t) {
            return Err(malformed());
        }
        let s = s.parse().map_err(|_| malformed())?;
        let t = t.parse().map_err(|_| malformed())?;
        alignment.insert(s, t);
    }
    Ok(alignment)
}

/// Links in ascending order, separated by single spaces.
pub fn write_pharaoh(alignment: &SentenceAlignment) -> String {
    alignment.to_string()
}

/// One alignment per non-comment line; line numbers start at 1 in errors.
pub fn parse_pharaoh_file(input: &str) -> Result<Vec<SentenceAlignment>> {
    input
        .lines()
        .enumerate()
        .map(|(n, line)| {
            parse_pharaoh(line).map_err(|e| match e {
                Error::MalformedPharaoh { column, token } => Error::MalformedPharaoh {
                    column,
                    token: format!("{token} (line {})", n + 1),
                },
                other => other,
            })
        })
        .collect()
}
