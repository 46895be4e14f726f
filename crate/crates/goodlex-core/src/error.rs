//! Error type shared by all core modules.

use alloc::string::String;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input data failed a structural invariant (bad rank sequence,
    /// duplicate id, malformed record, ...).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A configuration value is outside its documented domain.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A comment without a label reached an operation that needs one.
    #[error("comment has no label; unannotated data must be filtered out first")]
    MissingLabel,

    /// `build_counts` was called with nothing to count.
    #[error("empty corpus: no labeled comments to count")]
    EmptyCorpus,

    /// One of the Good/Bad classes has no comments, so class-conditional
    /// probabilities are undefined.
    #[error("degenerate class counts: n_good={n_good}, n_bad={n_bad}")]
    DegenerateClass { n_good: u64, n_bad: u64 },

    /// The word's total document frequency is below the configured
    /// minimum.
    #[error("word '{word}' is out of vocabulary (document frequency below min_count)")]
    OutOfVocabulary { word: String },

    /// Seed extraction produced no usable seeds.
    #[error("seed set is empty: no word has a nonzero semantic orientation")]
    EmptySeeds,

    /// Bootstrapping could not pseudo-label at least one comment of each
    /// class.
    #[error(
        "degenerate bootstrap: pseudo-labeled {n_good} Good and {n_bad} Bad comments \
         out of {n_total}; need at least one of each"
    )]
    DegenerateBootstrap {
        n_good: u64,
        n_bad: u64,
        n_total: u64,
    },

    /// Two vectors that must share a length do not.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A feature vector or weight vector does not match the schema it is
    /// used with.
    #[error("feature schema mismatch: {0}")]
    SchemaMismatch(String),

    /// The comment passed to a thread-level operation is not part of the
    /// thread.
    #[error("comment '{comment_id}' does not belong to thread '{thread_id}'")]
    CommentNotInThread {
        comment_id: String,
        thread_id: String,
    },

    /// k-means was asked for more clusters than there are points.
    #[error("k={k} exceeds the number of clusterable points ({points})")]
    KExceedsPoints { k: usize, points: usize },

    /// The corpus handed to a model-fitting routine has no usable words.
    #[error("empty vocabulary: nothing to fit")]
    EmptyVocabulary,

    /// SVM training requires both classes.
    #[error("training data contains a single class; need both Good and Bad instances")]
    SingleClass,

    /// Average precision is undefined without a relevant item; callers
    /// skip such queries.
    #[error("no relevant item in ranking; query must be skipped")]
    NoRelevantItem,

    /// A run file query does not line up with the gold data.
    #[error("run/gold mismatch for query '{qid}': {detail}")]
    QueryMismatch { qid: String, detail: String },

    /// A computed value is NaN or infinite where a finite number is
    /// required.
    #[error("non-finite value in {0}")]
    NonFinite(String),
}
