use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Token, TokenizedUtterance};
use crate::error::{Error, Result};

/// Universal Dependencies part-of-speech tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum UposTag {
    Adj,
    Adp,
    Adv,
    Aux,
    Cconj,
    Det,
    Intj,
    Noun,
    Num,
    Part,
    Pron,
    Propn,
    Punct,
    Sconj,
    Sym,
    Verb,
    X,
}

impl UposTag {
    pub const ALL: [UposTag; 17] = [
        UposTag::Adj,
        UposTag::Adp,
        UposTag::Adv,
        UposTag::Aux,
        UposTag::Cconj,
        UposTag::Det,
        UposTag::Intj,
        UposTag::Noun,
        UposTag::Num,
        UposTag::Part,
        UposTag::Pron,
        UposTag::Propn,
        UposTag::Punct,
        UposTag::Sconj,
        UposTag::Sym,
        UposTag::Verb,
        UposTag::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            UposTag::Adj => "ADJ",
            UposTag::Adp => "ADP",
            UposTag::Adv => "ADV",
            UposTag::Aux => "AUX",
            UposTag::Cconj => "CCONJ",
            UposTag::Det => "DET",
            UposTag::Intj => "INTJ",
            UposTag::Noun => "NOUN",
            UposTag::Num => "NUM",
            UposTag::Part => "PART",
            UposTag::Pron => "PRON",
            UposTag::Propn => "PROPN",
            UposTag::Punct => "PUNCT",
            UposTag::Sconj => "SCONJ",
            UposTag::Sym => "SYM",
            UposTag::Verb => "VERB",
            UposTag::X => "X",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl FromStr for UposTag {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        UposTag::ALL.iter().copied().find(|t| t.as_str() == s).ok_or(())
    }
}

impl fmt::Display for UposTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Chunk (content word), chink (function word) or punctuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WordClass {
    Content,
    Function,
    Punct,
}

impl FromStr for WordClass {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s.to_ascii_lowercase().as_str() {
            "content" | "chunk" => Ok(WordClass::Content),
            "function" | "chink" => Ok(WordClass::Function),
            "punct" => Ok(WordClass::Punct),
            _ => Err(()),
        }
    }
}

/// Tag → class table; overridable from a plain-text `TAG class` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkChinkTable {
    classes: [WordClass; 17],
}

impl Default for ChunkChinkTable {
    fn default() -> Self {
        let mut classes = [WordClass::Content; 17];
        for tag in UposTag::ALL {
            classes[tag.index()] = default_class(tag);
        }
        ChunkChinkTable { classes }
    }
}

fn default_class(tag: UposTag) -> WordClass {
    use UposTag::*;
    match tag {
        Punct => WordClass::Punct,
        Adp | Aux | Cconj | Sconj | Det | Part | Pron => WordClass::Function,
        Adj | Adv | Intj | Noun | Num | Propn | Sym | Verb | X => WordClass::Content,
    }
}

impl ChunkChinkTable {
    /// Starts from the default table and applies every `TAG class` row.
    pub fn parse(input: &str) -> Result<Self> {
        let mut table = ChunkChinkTable::default();
        for (n, line) in input.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |message: String| Error::MalformedClassTable { line: n + 1, message };
            let mut cols = line.split_whitespace();
            let (Some(tag), Some(class), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(malformed("expected `TAG class`".into()));
            };
            let tag: UposTag = tag.parse().map_err(|_| malformed(format!("unknown UPOS {tag:?}")))?;
            let class: WordClass = class.parse().map_err(|_| malformed(format!("unknown class {class:?}")))?;
            table.classes[tag.index()] = class;
        }
        Ok(table)
    }

    pub fn classify(&self, tag: UposTag) -> WordClass {
        self.classes[tag.index()]
    }
}

/// Default chunk/chink partition of the UPOS set.
pub fn classify_chunk_chink(tag: UposTag) -> WordClass {
    default_class(tag)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedUtterance {
    pub id: String,
    pub items: Vec<(Token, Option<UposTag>)>,
}

impl TaggedUtterance {
    pub fn break_count(&self) -> usize {
        self.items.iter().filter(|(t, _)| t.is_break()).count()
    }
}

/// Attaches tags positionally to the non-break tokens.
pub fn attach_tags(tokens: &TokenizedUtterance, tags: &[UposTag], id: &str) -> Result<TaggedUtterance> {
    let words = tokens.word_count();
    if words != tags.len() {
        return Err(Error::TagCountMismatch {
            id: id.to_string(),
            tokens: words,
            tags: tags.len(),
        });
    }
    let mut tags = tags.iter();
    let items = tokens
        .tokens
        .iter()
        .map(|t| {
            let tag = if t.is_break() { None } else { tags.next().copied() };
            (t.clone(), tag)
        })
        .collect();
    Ok(TaggedUtterance { id: id.to_string(), items })
}

/// Word → UPOS lookup, for tagging without an external tagger.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, UposTag>,
}

impl Lexicon {
    /// Reads `word<TAB>UPOS` rows.
    pub fn parse(input: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        for (n, line) in input.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (word, tag) = line.split_once('\t').ok_or_else(|| Error::MalformedLexicon {
                line: n + 1,
                message: "expected word<TAB>UPOS".into(),
            })?;
            let tag = tag.trim().parse().map_err(|_| Error::UnknownUpos {
                tag: tag.trim().to_string(),
                line: n + 1,
            })?;
            entries.insert(word.to_string(), tag);
        }
        Ok(Lexicon { entries })
    }

    pub fn insert(&mut self, word: impl Into<String>, tag: UposTag) {
        self.entries.insert(word.into(), tag);
    }

    /// Exact match, then lowercase; unknown words are `X`.
    pub fn lookup(&self, word: &str) -> UposTag {
        self.entries
            .get(word)
            .or_else(|| self.entries.get(&word.to_lowercase()))
            .copied()
            .unwrap_or(UposTag::X)
    }

    pub fn tag(&self, tokens: &TokenizedUtterance, id: &str) -> TaggedUtterance {
        let items = tokens
            .tokens
            .iter()
            .map(|t| {
                let tag = (!t.is_break()).then(|| self.lookup(t.surface()));
                (t.clone(), tag)
            })
            .collect();
        TaggedUtterance { id: id.to_string(), items }
    }
}
