//! Two-step semi-supervised induction of the goodness polarity lexicon.
//!
//! Step 1 scores every word of the annotated corpus by semantic
//! orientation and keeps the extreme tails as seed words. Step 2
//! pseudo-labels a large unannotated corpus with those seeds and runs
//! the same orientation computation over the pseudo-labeled comments,
//! producing the final large-scale lexicon. Exactly one bootstrap round
//! is performed.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cooccur::{build_counts, orientation_scores, ClassCounts, SmoothingConfig};
use crate::corpus::Polarity;
use crate::{Error, Result};

/// How unannotated comments are pseudo-labeled from seed words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PseudoLabelRule {
    /// Sign of the summed seed scores over all token occurrences.
    #[default]
    ScoreSum,
    /// Majority vote between good-seed and bad-seed occurrences.
    Majority,
}

/// Configuration for seed extraction and bootstrapping.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapConfig {
    /// Fraction of the scored vocabulary taken as seeds per polarity.
    pub seed_fraction: f64,
    pub smoothing: SmoothingConfig,
    pub pseudo_label_rule: PseudoLabelRule,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            seed_fraction: 0.05,
            smoothing: SmoothingConfig::default(),
            pseudo_label_rule: PseudoLabelRule::ScoreSum,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.seed_fraction > 0.0 && self.seed_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "seed_fraction must be in (0, 1], got {}",
                self.seed_fraction
            )));
        }
        Ok(())
    }
}

/// Seed words: the extreme tails of the orientation distribution.
///
/// Good seeds carry strictly positive scores, bad seeds strictly
/// negative ones, and the two word sets are disjoint.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeedSet {
    good: BTreeMap<String, f64>,
    bad: BTreeMap<String, f64>,
}

impl SeedSet {
    pub fn from_parts(good: BTreeMap<String, f64>, bad: BTreeMap<String, f64>) -> Result<Self> {
        if let Some((w, s)) = good.iter().find(|(_, s)| !(**s > 0.0)) {
            return Err(Error::InvalidData(format!(
                "good seed '{w}' has non-positive score {s}"
            )));
        }
        if let Some((w, s)) = bad.iter().find(|(_, s)| !(**s < 0.0)) {
            return Err(Error::InvalidData(format!(
                "bad seed '{w}' has non-negative score {s}"
            )));
        }
        if let Some(w) = good.keys().find(|w| bad.contains_key(*w)) {
            return Err(Error::InvalidData(format!(
                "word '{w}' appears in both seed sets"
            )));
        }
        Ok(SeedSet { good, bad })
    }

    pub fn good(&self) -> &BTreeMap<String, f64> {
        &self.good
    }

    pub fn bad(&self) -> &BTreeMap<String, f64> {
        &self.bad
    }

    pub fn is_empty(&self) -> bool {
        self.good.is_empty() && self.bad.is_empty()
    }

    /// Score of `word` if it is a seed (positive for good, negative for
    /// bad).
    pub fn score(&self, word: &str) -> Option<f64> {
        self.good
            .get(word)
            .or_else(|| self.bad.get(word))
            .copied()
    }
}

/// Metadata recorded alongside an induced lexicon.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LexiconMetadata {
    /// Comments seen by the bootstrap, labeled or not.
    pub n_source_comments: u64,
    /// Comments pseudo-labeled Good.
    pub n_pseudo_good: u64,
    /// Comments pseudo-labeled Bad.
    pub n_pseudo_bad: u64,
    pub alpha: f64,
    pub min_count: u64,
    pub seed_fraction: f64,
}

/// Word -> semantic-orientation score. Positive scores mark words
/// associated with Good answers, negative with Bad ones; zero scores are
/// never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GoodnessLexicon {
    scores: BTreeMap<String, f64>,
    metadata: LexiconMetadata,
}

impl GoodnessLexicon {
    pub fn from_parts(scores: BTreeMap<String, f64>, metadata: LexiconMetadata) -> Result<Self> {
        if let Some((w, s)) = scores.iter().find(|(_, s)| **s == 0.0 || !s.is_finite()) {
            return Err(Error::InvalidData(format!(
                "lexicon entry '{w}' has invalid score {s}; zero and non-finite scores are not stored"
            )));
        }
        Ok(GoodnessLexicon { scores, metadata })
    }

    pub fn score(&self, word: &str) -> Option<f64> {
        self.scores.get(word).copied()
    }

    pub fn scores(&self) -> &BTreeMap<String, f64> {
        &self.scores
    }

    pub fn metadata(&self) -> &LexiconMetadata {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Number of positive-score (Good) entries.
    pub fn good_len(&self) -> usize {
        self.scores.values().filter(|s| **s > 0.0).count()
    }

    /// Number of negative-score (Bad) entries.
    pub fn bad_len(&self) -> usize {
        self.scores.values().filter(|s| **s < 0.0).count()
    }
}

/// Rank the scored vocabulary by semantic orientation and keep the top
/// `ceil(seed_fraction * V)` words per polarity, restricted to strictly
/// positive (good) / strictly negative (bad) scores.
///
/// Ties are broken by higher total document frequency, then by
/// lexicographic word order, so extraction is deterministic.
pub fn extract_seeds(counts: &ClassCounts, cfg: &BootstrapConfig) -> Result<SeedSet> {
    cfg.validate()?;
    let scored = orientation_scores(counts, &cfg.smoothing)?;
    if scored.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let k = ceil_fraction(scored.len(), cfg.seed_fraction);

    // (word, so, total df) triples; sorted per polarity below.
    let mut ranked: Vec<(&str, f64, u64)> = scored
        .iter()
        .map(|(w, so)| (w.as_str(), *so, counts.df(w).total()))
        .collect();

    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("orientation scores are finite")
            .then(b.2.cmp(&a.2))
            .then(a.0.cmp(b.0))
    });
    let good: BTreeMap<String, f64> = ranked
        .iter()
        .take(k)
        .filter(|(_, so, _)| *so > 0.0)
        .map(|(w, so, _)| (String::from(*w), *so))
        .collect();

    ranked.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .expect("orientation scores are finite")
            .then(b.2.cmp(&a.2))
            .then(a.0.cmp(b.0))
    });
    let bad: BTreeMap<String, f64> = ranked
        .iter()
        .take(k)
        .filter(|(_, so, _)| *so < 0.0)
        .map(|(w, so, _)| (String::from(*w), *so))
        .collect();

    SeedSet::from_parts(good, bad)
}

fn ceil_fraction(len: usize, fraction: f64) -> usize {
    let k = libm::ceil(fraction * len as f64) as usize;
    k.clamp(1, len)
}

/// Pseudo-label one tokenized comment from the seed set, or `None` when
/// the evidence is absent or exactly tied.
pub fn pseudo_label(
    tokens: impl IntoIterator<Item = impl AsRef<str>>,
    seeds: &SeedSet,
    rule: PseudoLabelRule,
) -> Option<Polarity> {
    match rule {
        PseudoLabelRule::ScoreSum => {
            let mut sum = 0.0;
            let mut hit = false;
            for t in tokens {
                if let Some(s) = seeds.score(t.as_ref()) {
                    sum += s;
                    hit = true;
                }
            }
            if !hit || sum == 0.0 {
                None
            } else if sum > 0.0 {
                Some(Polarity::Good)
            } else {
                Some(Polarity::Bad)
            }
        }
        PseudoLabelRule::Majority => {
            let mut good = 0u64;
            let mut bad = 0u64;
            for t in tokens {
                let t = t.as_ref();
                if seeds.good.contains_key(t) {
                    good += 1;
                } else if seeds.bad.contains_key(t) {
                    bad += 1;
                }
            }
            match good.cmp(&bad) {
                core::cmp::Ordering::Greater => Some(Polarity::Good),
                core::cmp::Ordering::Less => Some(Polarity::Bad),
                core::cmp::Ordering::Equal => None,
            }
        }
    }
}

/// Step 2: pseudo-label the unannotated comments with the seeds, then
/// recompute semantic orientation over the pseudo-labeled subset.
///
/// Comments without seed evidence (or with exactly cancelling evidence)
/// are discarded, never guessed. Seed words themselves are re-scored
/// like any other word; Step-1 scores do not carry over.
pub fn bootstrap_lexicon<T>(
    unannotated: &[T],
    seeds: &SeedSet,
    cfg: &BootstrapConfig,
) -> Result<GoodnessLexicon>
where
    T: AsRef<[String]>,
{
    cfg.validate()?;
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    let mut labeled: Vec<(&T, Polarity)> = Vec::new();
    let mut n_good = 0u64;
    let mut n_bad = 0u64;
    for tokens in unannotated {
        if let Some(p) = pseudo_label(tokens.as_ref().iter(), seeds, cfg.pseudo_label_rule) {
            match p {
                Polarity::Good => n_good += 1,
                Polarity::Bad => n_bad += 1,
            }
            labeled.push((tokens, p));
        }
    }
    if n_good == 0 || n_bad == 0 {
        return Err(Error::DegenerateBootstrap {
            n_good,
            n_bad,
            n_total: unannotated.len() as u64,
        });
    }
    let counts = build_counts(
        labeled
            .iter()
            .map(|(t, p)| (t.as_ref().iter().map(String::as_str), *p)),
    )?;
    let scores: BTreeMap<String, f64> = orientation_scores(&counts, &cfg.smoothing)?
        .into_iter()
        .filter(|(_, so)| *so != 0.0)
        .collect();
    GoodnessLexicon::from_parts(
        scores,
        LexiconMetadata {
            n_source_comments: unannotated.len() as u64,
            n_pseudo_good: n_good,
            n_pseudo_bad: n_bad,
            alpha: cfg.smoothing.alpha,
            min_count: cfg.smoothing.min_count,
            seed_fraction: cfg.seed_fraction,
        },
    )
}
