//! LDA topic model fitted by collapsed Gibbs sampling, and the
//! question/comment topic-distribution similarity.
//!
//! The chain is sequential and seeded, so fitting and inference are
//! fully deterministic. Inference holds the fitted topic-word
//! distribution fixed and resamples only the document's topic counts.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::embeddings::cosine;
use crate::{Error, Result};

/// A fitted topic model: per-topic word distributions over a fixed
/// vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    num_topics: usize,
    vocabulary: Vec<String>,
    index: BTreeMap<String, usize>,
    /// `num_topics x vocabulary.len()`; every row sums to 1.
    topic_word: Vec<Vec<f64>>,
    alpha_doc: f64,
    beta_word: f64,
}

impl TopicModel {
    /// Reassemble a model (e.g. from a file), validating row
    /// normalization and hyperparameter domains.
    pub fn from_parts(
        vocabulary: Vec<String>,
        topic_word: Vec<Vec<f64>>,
        alpha_doc: f64,
        beta_word: f64,
    ) -> Result<Self> {
        if vocabulary.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        if topic_word.len() < 2 {
            return Err(Error::InvalidConfig("need at least 2 topics".into()));
        }
        if !(alpha_doc > 0.0) || !(beta_word > 0.0) {
            return Err(Error::InvalidConfig(
                "alpha_doc and beta_word must be positive".into(),
            ));
        }
        for (k, row) in topic_word.iter().enumerate() {
            if row.len() != vocabulary.len() {
                return Err(Error::DimensionMismatch {
                    expected: vocabulary.len(),
                    found: row.len(),
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 || row.iter().any(|p| *p < 0.0 || !p.is_finite()) {
                return Err(Error::InvalidData(alloc::format!(
                    "topic {k} is not a probability distribution (sum {sum})"
                )));
            }
        }
        let index = vocabulary
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        Ok(TopicModel {
            num_topics: topic_word.len(),
            vocabulary,
            index,
            topic_word,
            alpha_doc,
            beta_word,
        })
    }

    pub fn num_topics(&self) -> usize {
        self.num_topics
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn alpha_doc(&self) -> f64 {
        self.alpha_doc
    }

    pub fn beta_word(&self) -> f64 {
        self.beta_word
    }

    /// Word distribution of topic `k`.
    pub fn topic(&self, k: usize) -> &[f64] {
        &self.topic_word[k]
    }

    /// The `n` highest-probability words of topic `k`, ties broken by
    /// vocabulary order.
    pub fn top_words(&self, k: usize, n: usize) -> Vec<&str> {
        let mut order: Vec<usize> = (0..self.vocabulary.len()).collect();
        let row = &self.topic_word[k];
        order.sort_by(|&a, &b| {
            row[b]
                .partial_cmp(&row[a])
                .expect("probabilities are finite")
                .then(a.cmp(&b))
        });
        order
            .into_iter()
            .take(n)
            .map(|i| self.vocabulary[i].as_str())
            .collect()
    }
}

/// Conventional default document prior for `k` topics.
pub fn default_alpha_doc(num_topics: usize) -> f64 {
    50.0 / num_topics as f64
}

/// Default word smoothing.
pub const DEFAULT_BETA_WORD: f64 = 0.01;

struct GibbsFit {
    docs: Vec<Vec<usize>>,
    assignments: Vec<Vec<usize>>,
    doc_topic: Vec<Vec<u64>>,
    topic_word: Vec<Vec<u64>>,
    topic_total: Vec<u64>,
    num_topics: usize,
    vocab_len: usize,
    alpha: f64,
    beta: f64,
}

impl GibbsFit {
    fn init(docs: Vec<Vec<usize>>, num_topics: usize, vocab_len: usize, alpha: f64, beta: f64, rng: &mut ChaCha20Rng) -> Self {
        let mut state = GibbsFit {
            assignments: docs.iter().map(|d| vec![0; d.len()]).collect(),
            doc_topic: vec![vec![0; num_topics]; docs.len()],
            topic_word: vec![vec![0; vocab_len]; num_topics],
            topic_total: vec![0; num_topics],
            docs,
            num_topics,
            vocab_len,
            alpha,
            beta,
        };
        for d in 0..state.docs.len() {
            for i in 0..state.docs[d].len() {
                let z = rng.gen_range(0..num_topics);
                state.assignments[d][i] = z;
                state.doc_topic[d][z] += 1;
                state.topic_word[z][state.docs[d][i]] += 1;
                state.topic_total[z] += 1;
            }
        }
        state
    }

    fn sweep(&mut self, rng: &mut ChaCha20Rng, weights: &mut Vec<f64>) {
        let v_beta = self.vocab_len as f64 * self.beta;
        for d in 0..self.docs.len() {
            for i in 0..self.docs[d].len() {
                let w = self.docs[d][i];
                let old = self.assignments[d][i];
                self.doc_topic[d][old] -= 1;
                self.topic_word[old][w] -= 1;
                self.topic_total[old] -= 1;

                weights.clear();
                let mut total = 0.0;
                for k in 0..self.num_topics {
                    let p = (self.doc_topic[d][k] as f64 + self.alpha)
                        * (self.topic_word[k][w] as f64 + self.beta)
                        / (self.topic_total[k] as f64 + v_beta);
                    total += p;
                    weights.push(p);
                }
                let z = sample_index(weights, total, rng);
                self.assignments[d][i] = z;
                self.doc_topic[d][z] += 1;
                self.topic_word[z][w] += 1;
                self.topic_total[z] += 1;
            }
        }
        debug_assert_eq!(
            self.topic_total.iter().sum::<u64>(),
            self.docs.iter().map(|d| d.len() as u64).sum::<u64>(),
            "every token must hold exactly one topic assignment"
        );
    }

    #[cfg(test)]
    fn token_count(&self) -> u64 {
        self.docs.iter().map(|d| d.len() as u64).sum()
    }

    #[cfg(test)]
    fn assigned_count(&self) -> u64 {
        self.topic_total.iter().sum()
    }
}

fn sample_index(weights: &[f64], total: f64, rng: &mut ChaCha20Rng) -> usize {
    let mut target = rng.gen::<f64>() * total;
    for (k, w) in weights.iter().enumerate() {
        target -= w;
        if target <= 0.0 {
            return k;
        }
    }
    weights.len() - 1
}

/// Fit a topic model with `iterations` collapsed-Gibbs sweeps from a
/// seeded state. Deterministic for fixed inputs and seed.
pub fn fit_lda(
    corpus: &[Vec<String>],
    num_topics: usize,
    alpha_doc: f64,
    beta_word: f64,
    iterations: usize,
    seed: u64,
) -> Result<TopicModel> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if num_topics < 2 {
        return Err(Error::InvalidConfig("need at least 2 topics".into()));
    }
    if !(alpha_doc > 0.0) || !(beta_word > 0.0) {
        return Err(Error::InvalidConfig(
            "alpha_doc and beta_word must be positive".into(),
        ));
    }
    let mut vocab_set: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in corpus {
        for t in doc {
            let next = vocab_set.len();
            vocab_set.entry(t.as_str()).or_insert(next);
        }
    }
    if vocab_set.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    // Re-index so the vocabulary is lexicographic.
    let vocabulary: Vec<String> = vocab_set.keys().map(|w| String::from(*w)).collect();
    let index: BTreeMap<&str, usize> = vocabulary
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), i))
        .collect();
    let docs: Vec<Vec<usize>> = corpus
        .iter()
        .map(|doc| doc.iter().map(|t| index[t.as_str()]).collect())
        .collect();

    let mut rng = <ChaCha20Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut state = GibbsFit::init(docs, num_topics, vocabulary.len(), alpha_doc, beta_word, &mut rng);
    let mut weights = Vec::with_capacity(num_topics);
    for _ in 0..iterations {
        state.sweep(&mut rng, &mut weights);
    }

    let v_beta = vocabulary.len() as f64 * beta_word;
    let topic_word: Vec<Vec<f64>> = (0..num_topics)
        .map(|k| {
            let denom = state.topic_total[k] as f64 + v_beta;
            state.topic_word[k]
                .iter()
                .map(|c| (*c as f64 + beta_word) / denom)
                .collect()
        })
        .collect();
    TopicModel::from_parts(vocabulary, topic_word, alpha_doc, beta_word)
}

/// Infer a document's topic distribution by Gibbs sampling with the
/// topic-word distribution held fixed. All-out-of-vocabulary (or empty)
/// input yields the uniform distribution.
pub fn infer_topics(
    tokens: &[String],
    model: &TopicModel,
    iterations: usize,
    seed: u64,
) -> Vec<f64> {
    let k = model.num_topics;
    let ids: Vec<usize> = tokens
        .iter()
        .filter_map(|t| model.index.get(t).copied())
        .collect();
    if ids.is_empty() {
        return vec![1.0 / k as f64; k];
    }
    let mut rng = <ChaCha20Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut counts = vec![0u64; k];
    let mut assignments: Vec<usize> = ids
        .iter()
        .map(|_| {
            let z = rng.gen_range(0..k);
            counts[z] += 1;
            z
        })
        .collect();
    let mut weights = Vec::with_capacity(k);
    for _ in 0..iterations {
        for (i, &w) in ids.iter().enumerate() {
            let old = assignments[i];
            counts[old] -= 1;
            weights.clear();
            let mut total = 0.0;
            for (t, row) in model.topic_word.iter().enumerate() {
                let p = row[w] * (counts[t] as f64 + model.alpha_doc);
                total += p;
                weights.push(p);
            }
            let z = sample_index(&weights, total, &mut rng);
            assignments[i] = z;
            counts[z] += 1;
        }
    }
    let denom = ids.len() as f64 + k as f64 * model.alpha_doc;
    counts
        .iter()
        .map(|c| (*c as f64 + model.alpha_doc) / denom)
        .collect()
}

/// Cosine between the inferred topic distributions of the two token
/// sequences.
pub fn topic_similarity(
    q_tokens: &[String],
    a_tokens: &[String],
    model: &TopicModel,
    iterations: usize,
    seed: u64,
) -> f64 {
    let q = infer_topics(q_tokens, model, iterations, seed);
    let a = infer_topics(a_tokens, model, iterations, seed);
    cosine(&q, &a).expect("distributions share the topic count")
}
