use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("vocabulary size {requested} must exceed the alphabet size {alphabet}")]
    VocabTooSmall { requested: usize, alphabet: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("negative count {0}")]
    NegativeCount(i64),
    #[error("count {count} lies below the first bin edge {first_edge}")]
    BelowFirstEdge { count: i64, first_edge: i64 },
    #[error("bin edges must be non-empty and strictly ascending")]
    BadEdges,
    #[error("morphemes {morphs:?} do not concatenate to {word:?}")]
    ConcatMismatch { word: String, morphs: Vec<String> },
    #[error("invalid morpheme feature profile: {0}")]
    InvalidProfile(String),
    #[error("annotation inconsistency for {form:?}: sheet says fusion {provided}, recomputed {computed}")]
    FusionMismatch {
        form: String,
        provided: f64,
        computed: f64,
    },
    #[error("override for sentence {sentence}, token {token} does not refer to an existing token")]
    BadOverride { sentence: usize, token: usize },
    #[error("{0} must be in range")]
    OutOfRange(String),
    #[error("not enough observations: n = {n} with {k} predictors")]
    TooFewObservations { n: usize, k: usize },
    #[error("design matrix is rank deficient; collinear predictors: {0:?}")]
    RankDeficient(Vec<String>),
    #[error("no predictors left after dropping constant columns")]
    NoPredictors,
}

pub type Result<T> = core::result::Result<T, Error>;
