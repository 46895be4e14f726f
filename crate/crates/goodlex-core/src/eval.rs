//! Ranking evaluation: mean average precision, average recall, and mean
//! reciprocal rank over gold-labeled threads, plus the chronological and
//! random baselines.
//!
//! A comment is relevant iff its binarized label is Good. Queries with
//! no relevant comment are skipped entirely (not scored as zero), and
//! all three metrics are reported on the 0..100 scale.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha20Rng;

use crate::corpus::{Polarity, Thread};
use crate::{Error, Result};

/// One ranked comment in a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    pub comment_id: String,
    pub score: f64,
    pub predicted_good: bool,
}

/// Per-query rankings, ordered by score descending within each query.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunFile {
    queries: Vec<(String, Vec<RunEntry>)>,
}

impl RunFile {
    pub fn new(queries: Vec<(String, Vec<RunEntry>)>) -> Result<Self> {
        let mut seen_queries = BTreeSet::new();
        for (qid, entries) in &queries {
            if !seen_queries.insert(qid.as_str()) {
                return Err(Error::InvalidData(format!(
                    "query '{qid}' appears twice in the run"
                )));
            }
            let mut seen = BTreeSet::new();
            for e in entries {
                if !seen.insert(e.comment_id.as_str()) {
                    return Err(Error::InvalidData(format!(
                        "query '{qid}' ranks comment '{}' twice",
                        e.comment_id
                    )));
                }
                if !e.score.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "score of comment '{}' in query '{qid}'",
                        e.comment_id
                    )));
                }
            }
            for pair in entries.windows(2) {
                if pair[0].score < pair[1].score {
                    return Err(Error::InvalidData(format!(
                        "query '{qid}' is not ordered by descending score"
                    )));
                }
            }
        }
        Ok(RunFile { queries })
    }

    pub fn queries(&self) -> &[(String, Vec<RunEntry>)] {
        &self.queries
    }
}

/// Evaluation results on the 0..100 scale, with per-query diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub map: f64,
    pub avg_rec: f64,
    pub mrr: f64,
    /// (query id, average precision in 0..1) for every scored query, in
    /// run order.
    pub per_query_ap: Vec<(String, f64)>,
    pub num_queries_scored: usize,
    pub num_queries_skipped: usize,
}

/// Mean over relevant positions of precision-at-that-position. Errors
/// when nothing is relevant; the caller skips such queries.
pub fn average_precision(ranked: &[bool]) -> Result<f64> {
    let mut hits = 0u64;
    let mut sum = 0.0;
    for (i, rel) in ranked.iter().enumerate() {
        if *rel {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    if hits == 0 {
        return Err(Error::NoRelevantItem);
    }
    Ok(sum / hits as f64)
}

/// Reciprocal rank of the first relevant item.
pub fn reciprocal_rank(ranked: &[bool]) -> Result<f64> {
    ranked
        .iter()
        .position(|r| *r)
        .map(|i| 1.0 / (i + 1) as f64)
        .ok_or(Error::NoRelevantItem)
}

/// Mean over all positions `i = 1..=n` of recall-at-i.
pub fn average_recall(ranked: &[bool]) -> Result<f64> {
    let total: u64 = ranked.iter().map(|r| u64::from(*r)).sum();
    if total == 0 {
        return Err(Error::NoRelevantItem);
    }
    let mut hits = 0u64;
    let mut sum = 0.0;
    for rel in ranked {
        hits += u64::from(*rel);
        sum += hits as f64 / total as f64;
    }
    Ok(sum / ranked.len() as f64)
}

/// Score a run against gold threads.
///
/// Every run query must exist in gold with the identical comment-id
/// set; gold comments must all carry labels. Queries whose gold has no
/// Good comment are skipped for all three metrics.
pub fn evaluate(run: &RunFile, gold: &[Thread]) -> Result<EvalReport> {
    let mut gold_map: BTreeMap<&str, BTreeMap<&str, bool>> = BTreeMap::new();
    for thread in gold {
        let qid = thread.question().id.as_str();
        let mut labels = BTreeMap::new();
        for c in thread.comments() {
            labels.insert(c.id.as_str(), c.polarity()? == Polarity::Good);
        }
        gold_map.insert(qid, labels);
    }

    let mut per_query_ap = Vec::new();
    let mut rr_sum = 0.0;
    let mut arec_sum = 0.0;
    let mut skipped = 0usize;
    for (qid, entries) in run.queries() {
        let Some(gq) = gold_map.get(qid.as_str()) else {
            return Err(Error::QueryMismatch {
                qid: qid.clone(),
                detail: "query is not present in the gold data".into(),
            });
        };
        let run_ids: BTreeSet<&str> = entries.iter().map(|e| e.comment_id.as_str()).collect();
        let gold_ids: BTreeSet<&str> = gq.keys().copied().collect();
        if run_ids != gold_ids {
            let missing: Vec<&str> = gold_ids.difference(&run_ids).copied().collect();
            let extra: Vec<&str> = run_ids.difference(&gold_ids).copied().collect();
            return Err(Error::QueryMismatch {
                qid: qid.clone(),
                detail: format!(
                    "comment ids differ from gold (missing {missing:?}, unexpected {extra:?})"
                ),
            });
        }
        let ranked: Vec<bool> = entries.iter().map(|e| gq[e.comment_id.as_str()]).collect();
        if !ranked.iter().any(|r| *r) {
            skipped += 1;
            continue;
        }
        per_query_ap.push((qid.clone(), average_precision(&ranked)?));
        rr_sum += reciprocal_rank(&ranked)?;
        arec_sum += average_recall(&ranked)?;
    }
    let scored = per_query_ap.len();
    if scored == 0 {
        return Err(Error::InvalidData(
            "no query has a relevant comment; nothing to score".into(),
        ));
    }
    let n = scored as f64;
    let map = per_query_ap.iter().map(|(_, ap)| ap).sum::<f64>() / n * 100.0;
    Ok(EvalReport {
        map,
        avg_rec: arec_sum / n * 100.0,
        mrr: rr_sum / n * 100.0,
        per_query_ap,
        num_queries_scored: scored,
        num_queries_skipped: skipped,
    })
}

/// Chronological baseline: earlier comments rank higher (score is minus
/// the thread rank).
pub fn baseline_time(threads: &[Thread]) -> RunFile {
    let queries = threads
        .iter()
        .map(|t| {
            let entries = t
                .comments()
                .iter()
                .map(|c| RunEntry {
                    comment_id: c.id.clone(),
                    score: -f64::from(c.rank_in_thread),
                    predicted_good: false,
                })
                .collect();
            (t.question().id.clone(), entries)
        })
        .collect();
    RunFile::new(queries).expect("thread invariants yield a valid run")
}

/// Random baseline: a seeded uniform shuffle of every thread.
pub fn baseline_random(threads: &[Thread], seed: u64) -> RunFile {
    let mut rng = <ChaCha20Rng as rand::SeedableRng>::seed_from_u64(seed);
    let queries = threads
        .iter()
        .map(|t| {
            let mut order: Vec<usize> = (0..t.comments().len()).collect();
            order.shuffle(&mut rng);
            let entries = order
                .iter()
                .enumerate()
                .map(|(pos, &i)| RunEntry {
                    comment_id: t.comments()[i].id.clone(),
                    score: -((pos + 1) as f64),
                    predicted_good: false,
                })
                .collect();
            (t.question().id.clone(), entries)
        })
        .collect();
    RunFile::new(queries).expect("shuffled positions yield descending scores")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Comment, CommentLabel, Question};
    use alloc::string::ToString;
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn thread(qid: &str, labels: &[CommentLabel]) -> Thread {
        let question = Question {
            id: qid.to_string(),
            author_id: "qa".into(),
            subject: String::new(),
            body: String::new(),
            category: String::new(),
        };
        let comments = labels
            .iter()
            .enumerate()
            .map(|(i, l)| Comment {
                id: format!("{qid}_c{}", i + 1),
                author_id: format!("u{i}"),
                rank_in_thread: (i + 1) as u32,
                text: String::new(),
                label: Some(*l),
            })
            .collect();
        Thread::new(question, comments).unwrap()
    }

    /// A run that ranks a thread's comments in the given id order.
    fn run_in_order(qid: &str, ids: &[&str]) -> RunFile {
        let entries = ids
            .iter()
            .enumerate()
            .map(|(i, id)| RunEntry {
                comment_id: id.to_string(),
                score: -(i as f64) - 1.0,
                predicted_good: false,
            })
            .collect();
        RunFile::new(vec![(qid.to_string(), entries)]).unwrap()
    }

    use CommentLabel::{Bad, Good};

    #[test]
    fn average_precision_hand_values() {
        assert_eq!(average_precision(&[true]).unwrap(), 1.0);
        assert_abs_diff_eq!(
            average_precision(&[true, false, true]).unwrap(),
            5.0 / 6.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            average_precision(&[false, false, true]).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-12
        );
        assert_eq!(
            average_precision(&[false, false]).unwrap_err(),
            Error::NoRelevantItem
        );
    }

    #[test]
    fn evaluate_single_query_hand_values() {
        let gold = [thread("q1", &[Good, Bad, Good])];
        let run = run_in_order("q1", &["q1_c1", "q1_c2", "q1_c3"]);
        let report = evaluate(&run, &gold).unwrap();
        assert_abs_diff_eq!(report.map, 100.0 * 5.0 / 6.0, epsilon = 1e-9);
        assert_abs_diff_eq!(report.mrr, 100.0, epsilon = 1e-9);
        // recall@1..3 = 1/2, 1/2, 1 -> mean 2/3.
        assert_abs_diff_eq!(report.avg_rec, 100.0 * 2.0 / 3.0, epsilon = 1e-9);
        assert_eq!(report.num_queries_scored, 1);
        assert_eq!(report.num_queries_skipped, 0);
    }

    #[test]
    fn evaluate_perfect_ranking_scores_100() {
        let gold = [
            thread("q1", &[Good, Bad, Bad]),
            thread("q2", &[Good, Good, Bad]),
        ];
        let run = baseline_time(&gold);
        let report = evaluate(&run, &gold).unwrap();
        assert_abs_diff_eq!(report.map, 100.0, epsilon = 1e-9);
        assert_abs_diff_eq!(report.mrr, 100.0, epsilon = 1e-9);
    }

    #[test]
    fn evaluate_skips_queries_without_relevant() {
        let gold = [
            thread("q1", &[Bad, Bad]),
            thread("q2", &[Good, Bad]),
        ];
        let run = baseline_time(&gold);
        let report = evaluate(&run, &gold).unwrap();
        assert_eq!(report.num_queries_scored, 1);
        assert_eq!(report.num_queries_skipped, 1);
        // PotentiallyUseful counts as non-relevant.
        let gold2 = [thread("q1", &[CommentLabel::PotentiallyUseful, Good])];
        let report2 = evaluate(&baseline_time(&gold2), &gold2).unwrap();
        assert_abs_diff_eq!(report2.map, 50.0, epsilon = 1e-9);
    }

    #[test]
    fn evaluate_rejects_mismatched_ids() {
        let gold = [thread("q1", &[Good, Bad])];
        let run = run_in_order("q1", &["q1_c1", "q1_cX"]);
        assert!(matches!(
            evaluate(&run, &gold).unwrap_err(),
            Error::QueryMismatch { .. }
        ));
        let unknown = run_in_order("qZ", &["a"]);
        assert!(matches!(
            evaluate(&unknown, &gold).unwrap_err(),
            Error::QueryMismatch { .. }
        ));
    }

    #[test]
    fn evaluate_errors_when_nothing_scorable() {
        let gold = [thread("q1", &[Bad, Bad])];
        let run = baseline_time(&gold);
        assert!(matches!(
            evaluate(&run, &gold).unwrap_err(),
            Error::InvalidData(_)
        ));
    }

    #[test]
    fn run_file_validation() {
        // Duplicate comment.
        let entries = vec![
            RunEntry { comment_id: "c".into(), score: 1.0, predicted_good: true },
            RunEntry { comment_id: "c".into(), score: 0.5, predicted_good: true },
        ];
        assert!(RunFile::new(vec![("q".to_string(), entries)]).is_err());
        // Ascending scores.
        let entries = vec![
            RunEntry { comment_id: "a".into(), score: 0.1, predicted_good: true },
            RunEntry { comment_id: "b".into(), score: 0.9, predicted_good: true },
        ];
        assert!(RunFile::new(vec![("q".to_string(), entries)]).is_err());
        // Duplicate query id.
        assert!(RunFile::new(vec![
            ("q".to_string(), Vec::new()),
            ("q".to_string(), Vec::new())
        ])
        .is_err());
    }

    #[test]
    fn baseline_time_is_chronological() {
        let gold = [thread("q1", &[Bad, Good, Bad])];
        let run = baseline_time(&gold);
        let ids: Vec<&str> = run.queries()[0]
            .1
            .iter()
            .map(|e| e.comment_id.as_str())
            .collect();
        assert_eq!(ids, vec!["q1_c1", "q1_c2", "q1_c3"]);
    }

    #[test]
    fn baseline_random_is_seeded_and_stable() {
        let gold = [
            thread("q1", &[Good, Bad, Bad, Good]),
            thread("q2", &[Bad, Good]),
        ];
        assert_eq!(baseline_random(&gold, 9), baseline_random(&gold, 9));
        let single = [thread("q3", &[Good])];
        let run = baseline_random(&single, 1);
        assert_eq!(run.queries()[0].1[0].comment_id, "q3_c1");
    }

    #[test]
    fn random_baseline_expectation_by_enumeration() {
        // All 6 orderings of a 3-comment thread; the mean AP must equal
        // the closed-form expectations.
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let mean_ap = |labels: [bool; 3]| -> f64 {
            let total: f64 = perms
                .iter()
                .map(|p| {
                    let ranked: Vec<bool> = p.iter().map(|&i| labels[i]).collect();
                    average_precision(&ranked).unwrap()
                })
                .sum();
            total / perms.len() as f64
        };
        // One relevant of three: (1 + 1/2 + 1/3) / 3 = 11/18.
        assert_abs_diff_eq!(mean_ap([true, false, false]), 11.0 / 18.0, epsilon = 1e-9);
        // Two relevant of three: (1 + 5/6 + 7/12) / 3 = 29/36.
        assert_abs_diff_eq!(mean_ap([true, true, false]), 29.0 / 36.0, epsilon = 1e-9);
    }

    #[test]
    fn metric_oracle_exhaustive_short_threads() {
        // Independent oracles, written directly from the definitions.
        fn ap_oracle(r: &[bool]) -> f64 {
            let positions: Vec<usize> = (0..r.len()).filter(|&i| r[i]).collect();
            let sum: f64 = positions
                .iter()
                .map(|&i| {
                    let hits = r[..=i].iter().filter(|x| **x).count();
                    hits as f64 / (i + 1) as f64
                })
                .sum();
            sum / positions.len() as f64
        }
        fn rr_oracle(r: &[bool]) -> f64 {
            1.0 / (r.iter().position(|x| *x).unwrap() + 1) as f64
        }
        fn arec_oracle(r: &[bool]) -> f64 {
            let total = r.iter().filter(|x| **x).count() as f64;
            let sum: f64 = (1..=r.len())
                .map(|i| r[..i].iter().filter(|x| **x).count() as f64 / total)
                .sum();
            sum / r.len() as f64
        }
        for n in 1..=4usize {
            for mask in 1u32..(1 << n) {
                let ranked: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
                assert_eq!(average_precision(&ranked).unwrap(), ap_oracle(&ranked));
                assert_eq!(reciprocal_rank(&ranked).unwrap(), rr_oracle(&ranked));
                assert_eq!(average_recall(&ranked).unwrap(), arec_oracle(&ranked));
            }
        }
    }

    proptest! {
        #[test]
        fn tail_permutation_never_changes_ap(
            ranked in prop::collection::vec(prop::bool::ANY, 1..12),
            swap in prop::bool::ANY,
        ) {
            prop_assume!(ranked.iter().any(|r| *r));
            let last_rel = ranked.iter().rposition(|r| *r).unwrap();
            let mut permuted = ranked.clone();
            // Any permutation of the all-false tail is a no-op; reverse it.
            if swap {
                permuted[last_rel + 1..].reverse();
            }
            prop_assert_eq!(
                average_precision(&ranked).unwrap(),
                average_precision(&permuted).unwrap()
            );
        }

        #[test]
        fn evaluate_is_query_order_invariant(seed in 0u64..1000) {
            let gold = [
                thread("q1", &[Good, Bad, Bad]),
                thread("q2", &[Bad, Good, Good]),
                thread("q3", &[Good, Good, Bad]),
            ];
            let run = baseline_random(&gold, seed);
            let mut reversed_queries = run.queries().to_vec();
            reversed_queries.reverse();
            let reversed = RunFile::new(reversed_queries).unwrap();
            let a = evaluate(&run, &gold).unwrap();
            let b = evaluate(&reversed, &gold).unwrap();
            // Summation order changes, so allow for rounding noise.
            prop_assert!((a.map - b.map).abs() <= 1e-12);
            prop_assert!((a.avg_rec - b.avg_rec).abs() <= 1e-12);
            prop_assert!((a.mrr - b.mrr).abs() <= 1e-12);
        }
    }
}
