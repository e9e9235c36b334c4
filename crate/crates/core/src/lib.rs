//! Evaluation of captions and subtitles: transcription and translation
//! quality, conformity to subtitling constraints, and caption/subtitle
//! consistency, with the word aligner the lexical metric depends on.

pub mod align;
pub mod conformity;
pub mod consistency;
pub mod error;
pub mod quality;
pub mod subtitle;
pub mod text;

pub use error::{Error, Result};
pub use subtitle::{
    pair_documents, parse_marked_text, parse_srt, BreakKind, DocumentFormat, SubtitleBlock, SubtitleDocument,
    SubtitleLine, Timing, Utterance, UtterancePair,
};
pub use text::{tokenize, Language, Token, TokenScheme, TokenizedUtterance};
