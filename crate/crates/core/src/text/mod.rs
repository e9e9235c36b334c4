//! Tokenization, normalization and part-of-speech plumbing.

mod conllu;
mod pos;
mod tokenize;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::subtitle::marked::{scan_pieces, Piece};
use crate::subtitle::BreakKind;

pub use conllu::{parse_conllu, TagSequence};
pub use pos::{attach_tags, classify_chunk_chink, ChunkChinkTable, Lexicon, TaggedUtterance, UposTag, WordClass};
pub use tokenize::{tokenize_13a_segment, tokenize_mt_segment};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    surface: String,
    break_kind: Option<BreakKind>,
}

impl Token {
    /// Builds a token, recognizing break literals.
    pub fn new(surface: impl Into<String>) -> Self {
        let surface = surface.into();
        let break_kind = BreakKind::from_literal(&surface);
        Token { surface, break_kind }
    }

    pub fn from_break(kind: BreakKind) -> Self {
        Token {
            surface: kind.as_str().to_string(),
            break_kind: Some(kind),
        }
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn is_break(&self) -> bool {
        self.break_kind.is_some()
    }

    pub fn break_kind(&self) -> Option<BreakKind> {
        self.break_kind
    }
}

/// Language hint for the detached-punctuation tokenizer. Only apostrophe
/// handling depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Language {
    English,
    French,
    Italian,
    German,
    Other,
}

impl Language {
    pub fn code(self) -> &'static str {
        match self {
            Language::English => "en",
            Language::French => "fr",
            Language::Italian => "it",
            Language::German => "de",
            Language::Other => "xx",
        }
    }
}

impl FromStr for Language {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "en" | "english" => Language::English,
            "fr" | "french" => Language::French,
            "it" | "italian" => Language::Italian,
            "de" | "german" => Language::German,
            _ => Language::Other,
        })
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenScheme {
    /// Split on Unicode whitespace.
    Whitespace,
    /// The `13a` rules of the reference BLEU scorer.
    Intl13a,
    /// Rule-based detached-punctuation tokenization.
    MtDetached(Language),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedUtterance {
    pub tokens: Vec<Token>,
    pub scheme: TokenScheme,
}

impl TokenizedUtterance {
    pub fn words(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| !t.is_break())
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }

    pub fn break_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_break()).count()
    }

    pub fn surfaces(&self) -> Vec<&str> {
        self.tokens.iter().map(Token::surface).collect()
    }

    /// Single-space join, breaks included.
    pub fn joined(&self) -> String {
        self.surfaces().join(" ")
    }
}

/// Tokenizes one utterance. Break tokens are isolated before the scheme
/// runs, so every scheme preserves them one-to-one.
pub fn tokenize(text: &str, scheme: TokenScheme) -> TokenizedUtterance {
    let mut tokens = Vec::new();
    let mut segment: Vec<&str> = Vec::new();
    let flush = |segment: &mut Vec<&str>, tokens: &mut Vec<Token>| {
        if segment.is_empty() {
            return;
        }
        match scheme {
            TokenScheme::Whitespace => tokens.extend(segment.iter().map(|w| Token::new(*w))),
            TokenScheme::Intl13a => {
                tokens.extend(tokenize_13a_segment(&segment.join(" ")).into_iter().map(Token::new))
            }
            TokenScheme::MtDetached(lang) => {
                tokens.extend(tokenize_mt_segment(&segment.join(" "), lang).into_iter().map(Token::new))
            }
        }
        segment.clear();
    };
    for piece in scan_pieces(text) {
        match piece {
            Piece::Word(w) => segment.push(w),
            Piece::Break(kind) => {
                flush(&mut segment, &mut tokens);
                tokens.push(Token::from_break(kind));
            }
        }
    }
    flush(&mut segment, &mut tokens);
    TokenizedUtterance { tokens, scheme }
}

fn edge_punct() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[\p{P}\p{S}]+|[\p{P}\p{S}]+$").expect("valid regex"))
}

/// Drops breaks and punctuation-only tokens, strips punctuation from token
/// edges and lowercases what remains.
pub fn normalize_for_wer(tokens: &TokenizedUtterance) -> Vec<String> {
    tokens
        .words()
        .filter_map(|t| {
            let stripped = edge_punct().replace_all(t.surface(), "");
            (!stripped.is_empty()).then(|| stripped.to_lowercase())
        })
        .collect()
}
