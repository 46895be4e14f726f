//! Word-embedding store and the vector-similarity features: centroid,
//! maximized, and aligned question/answer similarities, k-means word
//! clustering with bag-of-cluster similarity, and a self-contained
//! PPMI-SVD trainer so the pipeline runs without external embedding
//! binaries.
//!
//! Every similarity degrades to 0 instead of erroring when text is out
//! of vocabulary or empty: a feature value must exist for every
//! question-comment pair.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::corpus::{tokenize, Question, TokenizerConfig};
use crate::linalg::{randomized_svd, Matrix};
use crate::{Error, Result};

/// Immutable word -> vector map with a fixed dimensionality.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingStore {
    pub fn from_vectors(dim: usize, vectors: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("embedding dim must be >= 1".into()));
        }
        for (word, v) in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format_word(word)));
            }
        }
        Ok(EmbeddingStore { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    /// Words and vectors in lexicographic word order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(w, v)| (w.as_str(), v.as_slice()))
    }
}

fn format_word(word: &str) -> String {
    let mut s = String::from("vector for '");
    s.push_str(word);
    s.push('\'');
    s
}

/// Cosine similarity, clamped into [-1, 1]. Zero when either vector has
/// zero norm; errors on length mismatch.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (libm::sqrt(nu) * libm::sqrt(nv))).clamp(-1.0, 1.0))
}

/// Arithmetic mean of the vectors of in-vocabulary, non-stopword tokens
/// (occurrences counted). `None` when no token qualifies.
pub fn centroid(
    tokens: &[String],
    store: &EmbeddingStore,
    stopwords: &BTreeSet<String>,
) -> Option<Vec<f64>> {
    let mut sum = vec![0.0; store.dim()];
    let mut count = 0usize;
    for t in tokens {
        if stopwords.contains(t) {
            continue;
        }
        if let Some(v) = store.vector(t) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            count += 1;
        }
    }
    if count == 0 {
        return None;
    }
    for s in &mut sum {
        *s /= count as f64;
    }
    Some(sum)
}

/// Cosine between the comment centroid and the question body / subject
/// centroids. An absent centroid on either side yields 0 for that pair.
pub fn qa_centroid_similarities(
    question: &Question,
    comment_tokens: &[String],
    store: &EmbeddingStore,
    tokenizer: &TokenizerConfig,
    stopwords: &BTreeSet<String>,
) -> (f64, f64) {
    let comment_centroid = centroid(comment_tokens, store, stopwords);
    let sim_to = |text: &str| -> f64 {
        let tokens = tokenize(text, tokenizer);
        match (centroid(&tokens, store, stopwords), &comment_centroid) {
            (Some(q), Some(c)) => cosine(&q, c).expect("centroids share the store dim"),
            _ => 0.0,
        }
    };
    (sim_to(&question.body), sim_to(&question.subject))
}

/// Rank every answer token by cosine to the question-body centroid and
/// average the top `n` similarities. Fewer than `n` scorable tokens
/// average what exists; none at all yields 0.
pub fn maximized_similarity(
    q_body_tokens: &[String],
    a_tokens: &[String],
    store: &EmbeddingStore,
    n: usize,
    stopwords: &BTreeSet<String>,
) -> f64 {
    assert!(n >= 1, "top-n must be at least 1");
    let Some(q_centroid) = centroid(q_body_tokens, store, stopwords) else {
        return 0.0;
    };
    let mut sims: Vec<f64> = a_tokens
        .iter()
        .filter(|t| !stopwords.contains(*t))
        .filter_map(|t| store.vector(t))
        .map(|v| cosine(&q_centroid, v).expect("store vectors share the dim"))
        .collect();
    if sims.is_empty() {
        return 0.0;
    }
    sims.sort_by(|a, b| b.partial_cmp(a).expect("cosines are finite"));
    let take = n.min(sims.len());
    sims[..take].iter().sum::<f64>() / take as f64
}

/// For each in-vocabulary question token, the best pairwise cosine with
/// any in-vocabulary answer token, averaged over question tokens. 0 when
/// no pair is scorable.
pub fn aligned_similarity(
    q_tokens: &[String],
    a_tokens: &[String],
    store: &EmbeddingStore,
    stopwords: &BTreeSet<String>,
) -> f64 {
    let a_vecs: Vec<&[f64]> = a_tokens
        .iter()
        .filter(|t| !stopwords.contains(*t))
        .filter_map(|t| store.vector(t))
        .collect();
    if a_vecs.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for t in q_tokens {
        if stopwords.contains(t) {
            continue;
        }
        let Some(qv) = store.vector(t) else { continue };
        let best = a_vecs
            .iter()
            .map(|av| cosine(qv, av).expect("store vectors share the dim"))
            .fold(f64::NEG_INFINITY, f64::max);
        total += best;
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}

/// Assignment of every stored word to one of `k` clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    k: usize,
    assignment: BTreeMap<String, usize>,
    centroids: Vec<Vec<f64>>,
    inertia_trace: Vec<f64>,
}

impl Clustering {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cluster_of(&self, word: &str) -> Option<usize> {
        self.assignment.get(word).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<String, usize> {
        &self.assignment
    }

    pub fn centroids(&self) -> &[Vec<f64>] {
        &self.centroids
    }

    /// Inertia (sum of squared distances to assigned centroids) after
    /// each assignment step; non-increasing by construction.
    pub fn inertia_trace(&self) -> &[f64] {
        &self.inertia_trace
    }

    pub fn final_inertia(&self) -> f64 {
        *self.inertia_trace.last().expect("at least one iteration runs")
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm over the store's vocabulary with k-means++
/// initialization. Deterministic for a fixed seed; empty clusters are
/// re-seeded at the point farthest from their stale centroid.
pub fn kmeans(
    store: &EmbeddingStore,
    k: usize,
    seed: u64,
    max_iters: usize,
) -> Result<Clustering> {
    let words: Vec<&str> = store.iter().map(|(w, _)| w).collect();
    let points: Vec<&[f64]> = store.iter().map(|(_, v)| v).collect();
    let n = points.len();
    if k == 0 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    if k > n {
        return Err(Error::KExceedsPoints { k, points: n });
    }
    let mut rng = <ChaCha20Rng as rand::SeedableRng>::seed_from_u64(seed);

    // k-means++ seeding: squared-distance-weighted draws.
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    let first = rng.gen_range(0..n);
    centroids.push(points[first].to_vec());
    let mut d2: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p, &centroids[0]))
        .collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, w) in d2.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            // All remaining mass is zero (duplicate points); any index works.
            rng.gen_range(0..n)
        };
        centroids.push(points[idx].to_vec());
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(squared_distance(p, centroids.last().expect("just pushed")));
        }
    }

    let mut assignments: Vec<usize> = vec![usize::MAX; n];
    let mut trace: Vec<f64> = Vec::new();
    for _iter in 0..max_iters.max(1) {
        // Assignment step; ties go to the lowest cluster id.
        let mut inertia = 0.0;
        let new_assignments: Vec<usize> = points
            .iter()
            .map(|p| {
                let mut best = 0usize;
                let mut best_d = f64::INFINITY;
                for (c, centroid) in centroids.iter().enumerate() {
                    let d = squared_distance(p, centroid);
                    if d < best_d {
                        best_d = d;
                        best = c;
                    }
                }
                inertia += best_d;
                best
            })
            .collect();
        debug_assert!(
            trace.last().map_or(true, |prev| inertia <= prev + 1e-9),
            "inertia increased"
        );
        trace.push(inertia);
        let stable = new_assignments == assignments;
        assignments = new_assignments;
        if stable {
            break;
        }

        // Update step: means of assigned points.
        let mut sums = vec![vec![0.0; store.dim()]; k];
        let mut sizes = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignments) {
            sizes[a] += 1;
            for (s, x) in sums[a].iter_mut().zip(*p) {
                *s += x;
            }
        }
        let mut reseeded: BTreeSet<usize> = BTreeSet::new();
        for c in 0..k {
            if sizes[c] > 0 {
                for s in &mut sums[c] {
                    *s /= sizes[c] as f64;
                }
                centroids[c] = core::mem::take(&mut sums[c]);
            } else {
                // Re-seed at the point farthest from the stale centroid,
                // skipping points claimed by earlier re-seeds this round.
                let mut far = None;
                let mut far_d = f64::NEG_INFINITY;
                for (i, p) in points.iter().enumerate() {
                    if reseeded.contains(&i) {
                        continue;
                    }
                    let d = squared_distance(p, &centroids[c]);
                    if d > far_d {
                        far_d = d;
                        far = Some(i);
                    }
                }
                let far = far.expect("fewer reseeds than points since k <= n");
                reseeded.insert(far);
                centroids[c] = points[far].to_vec();
            }
        }
    }

    let assignment: BTreeMap<String, usize> = words
        .iter()
        .zip(&assignments)
        .map(|(w, a)| (String::from(*w), *a))
        .collect();
    Ok(Clustering {
        k,
        assignment,
        centroids,
        inertia_trace: trace,
    })
}

/// Cosine between the bag-of-cluster-id count vectors of the two token
/// sequences. Tokens outside the clustered vocabulary are skipped; an
/// empty bag on either side yields 0.
pub fn cluster_similarity(
    q_tokens: &[String],
    a_tokens: &[String],
    clustering: &Clustering,
) -> f64 {
    let bag = |tokens: &[String]| -> BTreeMap<usize, u64> {
        let mut counts = BTreeMap::new();
        for t in tokens {
            if let Some(c) = clustering.cluster_of(t) {
                *counts.entry(c).or_insert(0) += 1;
            }
        }
        counts
    };
    let q = bag(q_tokens);
    let a = bag(a_tokens);
    if q.is_empty() || a.is_empty() {
        return 0.0;
    }
    let dot: f64 = q
        .iter()
        .filter_map(|(c, qc)| a.get(c).map(|ac| (*qc * *ac) as f64))
        .sum();
    let norm = |b: &BTreeMap<usize, u64>| libm::sqrt(b.values().map(|c| (c * c) as f64).sum());
    (dot / (norm(&q) * norm(&a))).clamp(0.0, 1.0)
}

/// Windowed word-word positive PMI matrix over the corpus vocabulary
/// (words with at least `min_count` occurrences), with the vocabulary in
/// lexicographic order.
pub fn ppmi_matrix(
    corpus: &[Vec<String>],
    window: usize,
    min_count: u64,
) -> Result<(Vec<String>, Matrix)> {
    let mut unigram: BTreeMap<&str, u64> = BTreeMap::new();
    for doc in corpus {
        for t in doc {
            *unigram.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let vocab: Vec<String> = unigram
        .iter()
        .filter(|(_, c)| **c >= min_count)
        .map(|(w, _)| String::from(*w))
        .collect();
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let index: BTreeMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), i))
        .collect();

    let v = vocab.len();
    let mut pair = Matrix::zeros(v, v);
    for doc in corpus {
        let ids: Vec<Option<usize>> = doc.iter().map(|t| index.get(t.as_str()).copied()).collect();
        for (i, a) in ids.iter().enumerate() {
            let Some(a) = a else { continue };
            for j in (i + 1)..(i + window + 1).min(ids.len()) {
                let Some(b) = ids[j] else { continue };
                pair.set(*a, b, pair.get(*a, b) + 1.0);
                pair.set(b, *a, pair.get(b, *a) + 1.0);
            }
        }
    }
    let row_sums: Vec<f64> = (0..v).map(|i| pair.row(i).iter().sum()).collect();
    let total: f64 = row_sums.iter().sum();
    let mut ppmi = Matrix::zeros(v, v);
    if total > 0.0 {
        for i in 0..v {
            for j in 0..v {
                let nij = pair.get(i, j);
                if nij > 0.0 {
                    let val = libm::log2(nij * total / (row_sums[i] * row_sums[j]));
                    if val > 0.0 {
                        ppmi.set(i, j, val);
                    }
                }
            }
        }
    }
    Ok((vocab, ppmi))
}

/// Train word vectors by factorizing the windowed PPMI matrix with a
/// seeded randomized truncated SVD. Rows are `U * sqrt(sigma)`,
/// L2-normalized; words whose PPMI row is numerically zero keep a zero
/// vector. Deterministic for a fixed seed.
pub fn train_ppmi_svd(
    corpus: &[Vec<String>],
    dim: usize,
    window: usize,
    min_count: u64,
    seed: u64,
) -> Result<EmbeddingStore> {
    if dim == 0 {
        return Err(Error::InvalidConfig("embedding dim must be >= 1".into()));
    }
    let (vocab, ppmi) = ppmi_matrix(corpus, window, min_count)?;
    let svd = randomized_svd(&ppmi, dim, 8, 2, seed)?;
    let keep = svd.sigma.len();
    let mut vectors = BTreeMap::new();
    for (i, word) in vocab.iter().enumerate() {
        let mut row = vec![0.0; dim];
        for (j, item) in row.iter_mut().take(keep).enumerate() {
            *item = svd.u.get(i, j) * libm::sqrt(svd.sigma[j]);
        }
        let norm = libm::sqrt(row.iter().map(|x| x * x).sum());
        if norm > 1e-12 {
            for x in &mut row {
                *x /= norm;
            }
        } else {
            row.iter_mut().for_each(|x| *x = 0.0);
        }
        vectors.insert(word.clone(), row);
    }
    EmbeddingStore::from_vectors(dim, vectors)
}
