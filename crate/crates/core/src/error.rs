use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("utterance {utterance}: empty utterance")]
    EmptyUtterance { utterance: usize },

    #[error("utterance {utterance}: empty segment")]
    EmptySegment { utterance: usize },

    #[error("invalid subtitle line {text:?}: {reason}")]
    InvalidLine { text: String, reason: &'static str },

    #[error("subtitle block must contain at least one line")]
    EmptyBlock,

    #[error("utterance {id:?} must contain at least one block")]
    NoBlocks { id: String },

    #[error("non-positive duration ({start_ms} ms -> {end_ms} ms)")]
    InvalidTiming { start_ms: u64, end_ms: u64 },

    #[error("utterance {id:?}: block interval lies outside the utterance interval")]
    BlockOutsideUtterance { id: String },

    #[error("duplicate utterance id {id:?}")]
    DuplicateId { id: String },

    #[error("id sidecar has {ids} ids for {utterances} utterances")]
    IdCountMismatch { ids: usize, utterances: usize },

    #[error("cue {cue}: malformed timing line {line:?}")]
    MalformedTiming { cue: String, line: String },

    #[error("cue {cue}: non-positive duration")]
    NonPositiveDuration { cue: String },

    #[error("SRT line {line}: {message}")]
    MalformedSrt { line: usize, message: String },

    #[error("grouping map line {line}: {message}")]
    MalformedGrouping { line: usize, message: String },

    #[error("utterance count mismatch: {0} vs {1}")]
    UtteranceCountMismatch(usize, usize),

    #[error("utterance ids do not match: caption {caption:?} vs subtitle {subtitle:?}")]
    UtteranceIdMismatch { caption: String, subtitle: String },

    #[error("unknown UPOS '{tag}' at line {line}")]
    UnknownUpos { tag: String, line: usize },

    #[error("malformed CoNLL-U at line {line}: {message}")]
    MalformedConllu { line: usize, message: String },

    #[error("lexicon line {line}: {message}")]
    MalformedLexicon { line: usize, message: String },

    #[error("chunk/chink table line {line}: {message}")]
    MalformedClassTable { line: usize, message: String },

    #[error("utterance {id:?}: {tokens} tokens but {tags} tags")]
    TagCountMismatch { id: String, tokens: usize, tags: usize },

    #[error("utterance {id:?}: token {index} adjacent to a break has no tag")]
    UntaggedToken { id: String, index: usize },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("hypothesis and reference sizes differ: {hyp} vs {reference}")]
    CorpusLengthMismatch { hyp: usize, reference: usize },

    #[error("reference corpus has no words after normalization")]
    EmptyReference,

    #[error("significance testing needs at least 2 segments, got {0}")]
    TooFewSegments(usize),

    #[error("resample count must be positive")]
    NoResamples,

    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),

    #[error("timing unavailable for mode {mode}")]
    TimingUnavailable { mode: &'static str },

    #[error("bitext pair {index}: {message}")]
    InvalidBitext { index: usize, message: String },

    #[error("pharaoh column {column}: malformed link {token:?}")]
    MalformedPharaoh { column: usize, token: String },

    #[error("utterance {id:?}: alignment link {source_index}-{target_index} out of bounds ({source_len}x{target_len})")]
    AlignmentOutOfBounds {
        id: String,
        source_index: usize,
        target_index: usize,
        source_len: usize,
        target_len: usize,
    },

    #[error("model file line {line}: {message}")]
    MalformedModel { line: usize, message: String },

    #[error("invalid aligner parameter: {0}")]
    InvalidAlignerParameter(String),

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("subtitle side has zero characters")]
    ZeroSubtitleCharacters,

    #[error("no utterance pairs")]
    NoPairs,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
