//! Assembly of the per-(question, comment) feature vector: the nine
//! goodness-lexicon features, the embedding/cluster/topic similarities,
//! and the thread metadata block with its category one-hot.
//!
//! Missing models degrade their block to zeros rather than erroring, so
//! a feature vector exists for every pair and ablations (e.g. "no
//! lexicon") change exactly one block.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{tokenize, Comment, Thread, TokenizerConfig};
use crate::embeddings::{
    aligned_similarity, cluster_similarity, maximized_similarity, qa_centroid_similarities,
    Clustering, EmbeddingStore,
};
use crate::lexicon::GoodnessLexicon;
use crate::topics::{topic_similarity, TopicModel};
use crate::{Error, Result};

/// Names of the fixed (non-category) feature slots, in vector order.
pub const FIXED_FEATURE_NAMES: [&str; 24] = [
    "lex_good_count",
    "lex_bad_count",
    "lex_good_frac",
    "lex_bad_frac",
    "lex_good_sum",
    "lex_bad_sum",
    "lex_total_sum",
    "lex_good_max",
    "lex_bad_min",
    "sim_centroid_body",
    "sim_centroid_subject",
    "sim_max_top1",
    "sim_max_top2",
    "sim_max_top3",
    "sim_max_top5",
    "sim_aligned",
    "sim_cluster",
    "sim_topic",
    "meta_question_mark",
    "meta_answer_len",
    "meta_question_len",
    "meta_len_ratio",
    "meta_same_author",
    "meta_rank",
];

/// Number of goodness-lexicon slots at the head of the vector.
pub const LEXICON_BLOCK_LEN: usize = 9;

/// The ordered feature names of one pipeline run. The category one-hot
/// block expands from the sorted set of categories seen at training
/// time and is frozen afterwards; unknown categories at test time map
/// to an all-zero block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    names: Vec<String>,
    categories: Vec<String>,
}

impl FeatureSchema {
    pub fn new(categories: impl IntoIterator<Item = String>) -> Self {
        let categories: Vec<String> = categories
            .into_iter()
            .collect::<BTreeSet<String>>()
            .into_iter()
            .collect();
        let mut names: Vec<String> =
            FIXED_FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
        names.extend(categories.iter().map(|c| format!("cat_{c}")));
        FeatureSchema { names, categories }
    }

    /// Rebuild a schema from a stored name list, validating the fixed
    /// prefix.
    pub fn from_names(names: &[String]) -> Result<Self> {
        if names.len() < FIXED_FEATURE_NAMES.len() {
            return Err(Error::SchemaMismatch(format!(
                "expected at least {} feature names, found {}",
                FIXED_FEATURE_NAMES.len(),
                names.len()
            )));
        }
        for (want, got) in FIXED_FEATURE_NAMES.iter().zip(names) {
            if want != got {
                return Err(Error::SchemaMismatch(format!(
                    "fixed feature '{got}' does not match expected '{want}'"
                )));
            }
        }
        let mut categories = Vec::new();
        for name in &names[FIXED_FEATURE_NAMES.len()..] {
            match name.strip_prefix("cat_") {
                Some(c) => categories.push(c.to_string()),
                None => {
                    return Err(Error::SchemaMismatch(format!(
                        "trailing feature '{name}' is not a category slot"
                    )))
                }
            }
        }
        Ok(FeatureSchema::new(categories))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }
}

/// Feature values aligned to a [`FeatureSchema`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(schema: &FeatureSchema, values: Vec<f64>) -> Result<Self> {
        if values.len() != schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "vector has {} values, schema has {} slots",
                values.len(),
                schema.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("feature '{}'", schema.names()[i])));
        }
        Ok(FeatureVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The nine goodness-lexicon features over a token sequence, counting
/// occurrences: Good/Bad hit counts, their fractions of all hits, score
/// sums (Good, Bad, combined), and the extreme scores (best Good, worst
/// Bad). All zeros when nothing matches.
pub fn lexicon_features(tokens: &[String], lex: &GoodnessLexicon) -> [f64; LEXICON_BLOCK_LEN] {
    let mut good_count = 0u64;
    let mut bad_count = 0u64;
    let mut good_sum = 0.0;
    let mut bad_sum = 0.0;
    let mut good_max = 0.0f64;
    let mut bad_min = 0.0f64;
    for t in tokens {
        let Some(score) = lex.score(t) else { continue };
        if score > 0.0 {
            good_count += 1;
            good_sum += score;
            good_max = good_max.max(score);
        } else {
            bad_count += 1;
            bad_sum += score;
            bad_min = bad_min.min(score);
        }
    }
    let hits = (good_count + bad_count) as f64;
    let (good_frac, bad_frac) = if hits > 0.0 {
        (good_count as f64 / hits, bad_count as f64 / hits)
    } else {
        (0.0, 0.0)
    };
    [
        good_count as f64,
        bad_count as f64,
        good_frac,
        bad_frac,
        good_sum,
        bad_sum,
        good_sum + bad_sum,
        good_max,
        bad_min,
    ]
}

/// The metadata block: question-mark flag, raw token lengths, length
/// ratio, same-author flag, chronological rank, and the category
/// one-hot. Lengths use the tokenizer without stopword removal so they
/// reflect verbosity, not content-word counts.
pub fn metadata_features(
    thread: &Thread,
    comment: &Comment,
    raw_tokenizer: &TokenizerConfig,
    schema: &FeatureSchema,
) -> Result<Vec<f64>> {
    if thread.comment(&comment.id) != Some(comment) {
        return Err(Error::CommentNotInThread {
            comment_id: comment.id.clone(),
            thread_id: thread.question().id.clone(),
        });
    }
    let question = thread.question();
    let answer_len = tokenize(&comment.text, raw_tokenizer).len();
    let question_len = tokenize(&question.subject, raw_tokenizer).len()
        + tokenize(&question.body, raw_tokenizer).len();
    let mut out = vec![
        f64::from(comment.text.contains('?')),
        answer_len as f64,
        question_len as f64,
        question_len as f64 / (answer_len.max(1)) as f64,
        f64::from(comment.author_id == question.author_id),
        f64::from(comment.rank_in_thread),
    ];
    for cat in schema.categories() {
        out.push(f64::from(*cat == question.category));
    }
    Ok(out)
}

/// Everything needed to featurize question-comment pairs. Optional
/// models zero their block; `include_metadata` likewise controls the
/// metadata block (the slots always exist, per the schema).
pub struct FeatureExtractor<'a> {
    raw_tokenizer: TokenizerConfig,
    stopwords: BTreeSet<String>,
    schema: FeatureSchema,
    pub lexicon: Option<&'a GoodnessLexicon>,
    pub embeddings: Option<&'a EmbeddingStore>,
    pub clustering: Option<&'a Clustering>,
    pub topics: Option<TopicScorer<'a>>,
    pub include_metadata: bool,
}

/// A fitted topic model plus its inference parameters.
#[derive(Clone, Copy)]
pub struct TopicScorer<'a> {
    pub model: &'a TopicModel,
    pub iterations: usize,
    pub seed: u64,
}

impl<'a> FeatureExtractor<'a> {
    /// `tokenizer` is the pipeline tokenizer; its stopword list drives
    /// the similarity-time filtering while lengths use the stopword-free
    /// variant.
    pub fn new(tokenizer: &TokenizerConfig, schema: FeatureSchema) -> Self {
        FeatureExtractor {
            raw_tokenizer: tokenizer.without_stopwords(),
            stopwords: tokenizer.stopwords().clone(),
            schema,
            lexicon: None,
            embeddings: None,
            clustering: None,
            topics: None,
            include_metadata: true,
        }
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    fn content_of(&self, raw: &[String]) -> Vec<String> {
        raw.iter()
            .filter(|t| !self.stopwords.contains(*t))
            .cloned()
            .collect()
    }

    /// Assemble the full feature vector for one comment of a thread.
    pub fn assemble(&self, thread: &Thread, comment: &Comment) -> Result<FeatureVector> {
        let question = thread.question();
        let comment_raw = tokenize(&comment.text, &self.raw_tokenizer);
        let comment_content = self.content_of(&comment_raw);
        let body_raw = tokenize(&question.body, &self.raw_tokenizer);
        let body_content = self.content_of(&body_raw);

        let mut values = Vec::with_capacity(self.schema.len());

        match self.lexicon {
            Some(lex) => values.extend(lexicon_features(&comment_content, lex)),
            None => values.extend([0.0; LEXICON_BLOCK_LEN]),
        }

        match self.embeddings {
            Some(store) => {
                let (body_sim, subject_sim) = qa_centroid_similarities(
                    question,
                    &comment_raw,
                    store,
                    &self.raw_tokenizer,
                    &self.stopwords,
                );
                values.push(body_sim);
                values.push(subject_sim);
                for n in [1usize, 2, 3, 5] {
                    values.push(maximized_similarity(
                        &body_raw,
                        &comment_raw,
                        store,
                        n,
                        &self.stopwords,
                    ));
                }
                values.push(aligned_similarity(
                    &body_raw,
                    &comment_raw,
                    store,
                    &self.stopwords,
                ));
            }
            None => values.extend([0.0; 7]),
        }

        values.push(match self.clustering {
            Some(clustering) => cluster_similarity(&body_content, &comment_content, clustering),
            None => 0.0,
        });

        values.push(match &self.topics {
            Some(t) => topic_similarity(&body_content, &comment_content, t.model, t.iterations, t.seed),
            None => 0.0,
        });

        if self.include_metadata {
            values.extend(metadata_features(
                thread,
                comment,
                &self.raw_tokenizer,
                &self.schema,
            )?);
        } else {
            // Validate membership even when the block is zeroed.
            if thread.comment(&comment.id) != Some(comment) {
                return Err(Error::CommentNotInThread {
                    comment_id: comment.id.clone(),
                    thread_id: question.id.clone(),
                });
            }
            values.extend(vec![0.0; 6 + self.schema.categories().len()]);
        }

        FeatureVector::new(&self.schema, values)
    }

    /// Feature vectors for every comment of the thread, in thread order.
    pub fn thread_features(&self, thread: &Thread) -> Result<Vec<(String, FeatureVector)>> {
        thread
            .comments()
            .iter()
            .map(|c| Ok((c.id.clone(), self.assemble(thread, c)?)))
            .collect()
    }
}
