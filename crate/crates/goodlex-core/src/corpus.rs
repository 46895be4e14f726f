//! Data model for question threads, tokenization, and label
//! binarization.
//!
//! A [`Thread`] is a question plus its chronologically ordered comments.
//! Annotated corpora carry a ternary [`CommentLabel`] per comment;
//! unannotated corpora carry none. All downstream counting works on the
//! binary [`Polarity`] obtained through [`binarize_label`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

/// Ternary annotation of a comment's quality as an answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CommentLabel {
    Good,
    PotentiallyUseful,
    Bad,
}

impl CommentLabel {
    /// Canonical string form used by the file formats.
    pub fn as_str(self) -> &'static str {
        match self {
            CommentLabel::Good => "Good",
            CommentLabel::PotentiallyUseful => "PotentiallyUseful",
            CommentLabel::Bad => "Bad",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "Good" => Ok(CommentLabel::Good),
            "PotentiallyUseful" => Ok(CommentLabel::PotentiallyUseful),
            "Bad" => Ok(CommentLabel::Bad),
            other => Err(Error::InvalidData(format!("unknown label '{other}'"))),
        }
    }
}

/// Binary goodness class. `Good` is the positive pole of the semantic
/// orientation scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Good,
    Bad,
}

impl Polarity {
    /// The opposite class.
    pub fn flipped(self) -> Self {
        match self {
            Polarity::Good => Polarity::Bad,
            Polarity::Bad => Polarity::Good,
        }
    }
}

/// Collapse the ternary annotation onto the binary scale.
///
/// `PotentiallyUseful` folds into `Bad`: only `Good` counts as a relevant
/// answer. Absent labels are an error; callers must filter unannotated
/// data themselves.
pub fn binarize_label(label: Option<CommentLabel>) -> Result<Polarity> {
    match label {
        Some(CommentLabel::Good) => Ok(Polarity::Good),
        Some(CommentLabel::PotentiallyUseful) | Some(CommentLabel::Bad) => Ok(Polarity::Bad),
        None => Err(Error::MissingLabel),
    }
}

/// One comment in a thread.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment {
    pub id: String,
    pub author_id: String,
    /// 1-based chronological position within the thread.
    pub rank_in_thread: u32,
    pub text: String,
    pub label: Option<CommentLabel>,
}

impl Comment {
    /// Binarized label; errors on unannotated comments.
    pub fn polarity(&self) -> Result<Polarity> {
        binarize_label(self.label)
    }
}

/// The question that opens a thread.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub id: String,
    pub author_id: String,
    pub subject: String,
    pub body: String,
    pub category: String,
}

/// A question with its ordered comments.
///
/// Construction validates the structural invariants (non-empty unique
/// ids, ranks forming the contiguous sequence `1..=n`), after which the
/// value is immutable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thread {
    question: Question,
    comments: Vec<Comment>,
}

impl Thread {
    pub fn new(question: Question, comments: Vec<Comment>) -> Result<Self> {
        if question.id.is_empty() {
            return Err(Error::InvalidData("question id is empty".to_string()));
        }
        let mut seen = BTreeSet::new();
        for (i, c) in comments.iter().enumerate() {
            if c.id.is_empty() {
                return Err(Error::InvalidData(format!(
                    "comment #{} of thread '{}' has an empty id",
                    i + 1,
                    question.id
                )));
            }
            if !seen.insert(c.id.as_str()) {
                return Err(Error::InvalidData(format!(
                    "duplicate comment id '{}' in thread '{}'",
                    c.id, question.id
                )));
            }
            let expected = (i + 1) as u32;
            if c.rank_in_thread != expected {
                return Err(Error::InvalidData(format!(
                    "thread '{}': comment '{}' has rank {} but position {} \
                     (ranks must be the contiguous sequence 1..=n)",
                    question.id, c.id, c.rank_in_thread, expected
                )));
            }
        }
        Ok(Thread { question, comments })
    }

    pub fn question(&self) -> &Question {
        &self.question
    }

    pub fn comments(&self) -> &[Comment] {
        &self.comments
    }

    /// Look a comment up by id.
    pub fn comment(&self, id: &str) -> Option<&Comment> {
        self.comments.iter().find(|c| c.id == id)
    }
}

/// Tokenizer configuration.
///
/// Tokens are maximal runs of Unicode letters and digits; everything
/// else separates. Digits are kept deliberately: bare numerals (phone
/// numbers, ids) are real lexicon entries in forum data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    lowercase: bool,
    stopwords: BTreeSet<String>,
    min_token_length: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            lowercase: true,
            stopwords: BTreeSet::new(),
            min_token_length: 1,
        }
    }
}

impl TokenizerConfig {
    /// Build a config, checking that the stopword list is lowercase when
    /// `lowercase` is on (otherwise entries could never match).
    pub fn new(
        lowercase: bool,
        stopwords: BTreeSet<String>,
        min_token_length: usize,
    ) -> Result<Self> {
        if lowercase {
            if let Some(w) = stopwords.iter().find(|w| w.chars().any(char::is_uppercase)) {
                return Err(Error::InvalidConfig(format!(
                    "stopword '{w}' contains uppercase characters but lowercase=true"
                )));
            }
        }
        Ok(TokenizerConfig {
            lowercase,
            stopwords,
            min_token_length,
        })
    }

    /// Same config with the stopword list dropped; used where raw token
    /// counts are wanted (length features).
    pub fn without_stopwords(&self) -> Self {
        TokenizerConfig {
            lowercase: self.lowercase,
            stopwords: BTreeSet::new(),
            min_token_length: self.min_token_length,
        }
    }

    pub fn lowercase(&self) -> bool {
        self.lowercase
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn min_token_length(&self) -> usize {
        self.min_token_length
    }
}

/// Split `text` into tokens under `cfg`.
///
/// Deterministic: maximal alphanumeric runs, lowercased per config, then
/// filtered by minimum length and the stopword list. Empty input yields
/// an empty sequence.
pub fn tokenize(text: &str, cfg: &TokenizerConfig) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .map(|s| {
            if cfg.lowercase {
                s.chars().flat_map(char::to_lowercase).collect()
            } else {
                s.to_string()
            }
        })
        .filter(|t: &String| t.chars().count() >= cfg.min_token_length)
        .filter(|t| !cfg.stopwords.contains(t))
        .collect()
}

/// Count the Good/Bad comments per label map; handy for diagnostics.
pub fn label_histogram(threads: &[Thread]) -> BTreeMap<&'static str, u64> {
    let mut hist = BTreeMap::new();
    for t in threads {
        for c in t.comments() {
            let key = match c.label {
                Some(l) => l.as_str(),
                None => "unlabeled",
            };
            *hist.entry(key).or_insert(0) += 1;
        }
    }
    hist
}
