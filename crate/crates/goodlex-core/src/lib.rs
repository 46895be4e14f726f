//! Core algorithms for goodness-polarity lexicon induction and
//! answer-quality ranking in community question answering forums.
//!
//! The crate is `no_std` (with `alloc`): everything here is pure
//! computation over in-memory data. File formats, IO, and the command
//! line driver live in the companion `goodlex` crate.
//!
//! The pipeline, end to end:
//!
//! 1. [`corpus`] — thread/comment data model, tokenization, label
//!    binarization.
//! 2. [`cooccur`] — class-conditional document frequencies and smoothed
//!    PMI / semantic orientation.
//! 3. [`lexicon`] — seed extraction from labeled data and bootstrapping
//!    over unannotated comments into a large goodness lexicon.
//! 4. [`embeddings`], [`topics`] — word-vector, cluster, and topic
//!    similarities between a question and a candidate answer.
//! 5. [`features`] — assembly of the per-pair feature vector.
//! 6. [`ranker`] — linear SVM trained with seeded SGD; comments ranked
//!    by decision score.
//! 7. [`eval`] — MAP / AvgRec / MRR plus chronological and random
//!    baselines.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cooccur;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod features;
pub mod lexicon;
pub mod linalg;
pub mod ranker;
pub mod topics;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
