use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A corpus or matrix with no documents, or no tokens in any document.
    EmptyCorpus,
    DuplicateId(String),
    /// Pruning removed every word, nothing is left to score.
    EmptyVocabulary,
    InvalidConfig(String),
    /// The reference set cannot anchor a scale (too few texts, equal scores, ...).
    InvalidReference(String),
    MissingScore { document: String, dimension: String },
    /// A virgin document shares no word with the word-score table.
    Unscorable(String),
    EmptyWordScores,
    /// The LBG transform needs at least two virgin texts with nonzero spread.
    DegenerateTransform(String),
    /// Martin-Vanberg anchors with equal raw or equal assigned scores.
    DegenerateAnchors { first: String, second: String },
    UnknownDocument(String),
    LengthMismatch { left: usize, right: usize },
    TooFewObservations { needed: usize, got: usize },
    ZeroVariance,
    /// A rescaling group whose minimum equals its maximum.
    ConstantGroup(String),
    DuplicateKey(String),
    AmbiguousCrosswalk(String),
    UnknownColumn(String),
    DimensionMismatch { expected: usize, got: usize },
    /// Model fits estimated on different row counts.
    NotComparable { first: usize, second: usize },
    /// Null log-likelihood of zero, McFadden's ratio is undefined.
    DegenerateNull,
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyCorpus => write!(f, "corpus has no documents or no tokens"),
            Error::DuplicateId(id) => write!(f, "duplicate document id `{id}`"),
            Error::EmptyVocabulary => write!(f, "no vocabulary left after pruning"),
            Error::InvalidConfig(msg) => write!(f, "invalid preprocessing config: {msg}"),
            Error::InvalidReference(msg) => write!(f, "invalid reference set: {msg}"),
            Error::MissingScore { document, dimension } => {
                write!(f, "reference document `{document}` has no score on dimension `{dimension}`")
            }
            Error::Unscorable(id) => {
                write!(f, "document `{id}` shares no words with the word-score table")
            }
            Error::EmptyWordScores => write!(f, "word-score table is empty"),
            Error::DegenerateTransform(msg) => write!(f, "transform undefined: {msg}"),
            Error::DegenerateAnchors { first, second } => {
                write!(f, "anchors `{first}` and `{second}` do not span a scale")
            }
            Error::UnknownDocument(id) => write!(f, "unknown document `{id}`"),
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::TooFewObservations { needed, got } => {
                write!(f, "need at least {needed} observations, got {got}")
            }
            Error::ZeroVariance => write!(f, "zero variance, correlation undefined"),
            Error::ConstantGroup(group) => write!(f, "cannot rescale constant group `{group}`"),
            Error::DuplicateKey(key) => write!(f, "duplicate key {key}"),
            Error::AmbiguousCrosswalk(key) => write!(f, "ambiguous crosswalk entry `{key}`"),
            Error::UnknownColumn(name) => write!(f, "unknown column `{name}`"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "expected {expected} features, got {got}")
            }
            Error::NotComparable { first, second } => {
                write!(f, "fits use different rows (n = {first} vs n = {second})")
            }
            Error::DegenerateNull => write!(f, "null model log-likelihood is zero"),
            Error::InvalidArgument(msg) => write!(f, "{msg}"),
        }
    }
}

impl core::error::Error for Error {}
