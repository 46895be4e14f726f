//! Linear SVM over question-comment feature vectors, trained by seeded
//! stochastic subgradient descent on the L2-regularized hinge loss
//! (Pegasos step sizes), with z-score standardization fitted on the
//! training data. Comments are ranked by the raw decision score.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha20Rng;

use crate::corpus::Polarity;
use crate::features::{FeatureSchema, FeatureVector};
use crate::{Error, Result};

/// Training hyperparameters. The positive class is always `Good`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// L2 regularization strength.
    pub lambda: f64,
    /// Full passes over the shuffled training set.
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda: 1e-4,
            epochs: 20,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "lambda must be positive and finite, got {}",
                self.lambda
            )));
        }
        if self.epochs < 1 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-feature standardization parameters learned on training data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaler {
    pub mean: f64,
    /// Population standard deviation; zero-variance features get 1 so
    /// they standardize to a constant 0.
    pub std: f64,
}

/// A trained linear model: standardization, weights aligned to the
/// schema, and a bias.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    schema: FeatureSchema,
    scaler: Vec<Scaler>,
    weights: Vec<f64>,
    bias: f64,
    config: TrainConfig,
    objective: f64,
}

impl LinearModel {
    pub fn from_parts(
        schema: FeatureSchema,
        scaler: Vec<Scaler>,
        weights: Vec<f64>,
        bias: f64,
        config: TrainConfig,
        objective: f64,
    ) -> Result<Self> {
        config.validate()?;
        if scaler.len() != schema.len() || weights.len() != schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "scaler/weights ({}, {}) do not match the schema length {}",
                scaler.len(),
                weights.len(),
                schema.len()
            )));
        }
        if scaler.iter().any(|s| !(s.std > 0.0) || !s.mean.is_finite()) {
            return Err(Error::InvalidData(
                "scaler stds must be positive and means finite".into(),
            ));
        }
        if weights.iter().any(|w| !w.is_finite()) || !bias.is_finite() {
            return Err(Error::NonFinite("model weights".into()));
        }
        Ok(LinearModel {
            schema,
            scaler,
            weights,
            bias,
            config,
            objective,
        })
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn scaler(&self) -> &[Scaler] {
        &self.scaler
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    /// Final value of the regularized hinge objective on the training
    /// set.
    pub fn objective(&self) -> f64 {
        self.objective
    }

    fn standardized(&self, fv: &FeatureVector) -> Result<Vec<f64>> {
        if fv.len() != self.schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "feature vector has {} values, model schema has {}",
                fv.len(),
                self.schema.len()
            )));
        }
        Ok(fv
            .values()
            .iter()
            .zip(&self.scaler)
            .map(|(x, s)| (x - s.mean) / s.std)
            .collect())
    }
}

fn polarity_sign(p: Polarity) -> f64 {
    match p {
        Polarity::Good => 1.0,
        Polarity::Bad => -1.0,
    }
}

fn fit_scaler(instances: &[(FeatureVector, Polarity)], dim: usize) -> Vec<Scaler> {
    let n = instances.len() as f64;
    let mut means = vec![0.0; dim];
    for (fv, _) in instances {
        for (m, x) in means.iter_mut().zip(fv.values()) {
            *m += x;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut vars = vec![0.0; dim];
    for (fv, _) in instances {
        for ((v, x), m) in vars.iter_mut().zip(fv.values()).zip(&means) {
            let d = x - m;
            *v += d * d;
        }
    }
    means
        .iter()
        .zip(&vars)
        .map(|(m, v)| {
            let std = libm::sqrt(v / n);
            Scaler {
                mean: *m,
                std: if std > 0.0 { std } else { 1.0 },
            }
        })
        .collect()
}

/// Train a linear SVM. Standardization is fitted on the given instances
/// only; optimization is Pegasos-style SGD (step size `1/(lambda*t)`,
/// projection onto the `1/sqrt(lambda)` ball) over a seeded shuffle,
/// with the bias carried as an augmented constant feature. Deterministic
/// for fixed inputs and seed.
pub fn train(
    instances: &[(FeatureVector, Polarity)],
    schema: &FeatureSchema,
    cfg: &TrainConfig,
) -> Result<LinearModel> {
    cfg.validate()?;
    if instances.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    for (fv, _) in instances {
        if fv.len() != schema.len() {
            return Err(Error::SchemaMismatch(format!(
                "instance has {} values, schema has {}",
                fv.len(),
                schema.len()
            )));
        }
    }
    let has_good = instances.iter().any(|(_, p)| *p == Polarity::Good);
    let has_bad = instances.iter().any(|(_, p)| *p == Polarity::Bad);
    if !has_good || !has_bad {
        return Err(Error::SingleClass);
    }

    let dim = schema.len();
    let scaler = fit_scaler(instances, dim);
    // Standardized rows with the constant bias column appended.
    let rows: Vec<(Vec<f64>, f64)> = instances
        .iter()
        .map(|(fv, p)| {
            let mut x: Vec<f64> = fv
                .values()
                .iter()
                .zip(&scaler)
                .map(|(v, s)| (v - s.mean) / s.std)
                .collect();
            x.push(1.0);
            (x, polarity_sign(*p))
        })
        .collect();

    let mut w = vec![0.0f64; dim + 1];
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut rng = <ChaCha20Rng as rand::SeedableRng>::seed_from_u64(cfg.seed);
    let radius = 1.0 / libm::sqrt(cfg.lambda);
    let mut t = 0u64;
    for _epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let (x, y) = &rows[i];
            let eta = 1.0 / (cfg.lambda * t as f64);
            let margin = *y * dot(&w, x);
            let shrink = 1.0 - eta * cfg.lambda; // = 1 - 1/t
            for wj in &mut w {
                *wj *= shrink;
            }
            if margin < 1.0 {
                for (wj, xj) in w.iter_mut().zip(x) {
                    *wj += eta * y * xj;
                }
            }
            let norm = libm::sqrt(dot(&w, &w));
            if norm > radius {
                let scale = radius / norm;
                for wj in &mut w {
                    *wj *= scale;
                }
            }
        }
    }

    let objective = hinge_objective(&w, &rows, cfg.lambda);
    let bias = w.pop().expect("augmented column exists");
    LinearModel::from_parts(schema.clone(), scaler, w, bias, *cfg, objective)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn hinge_objective(w: &[f64], rows: &[(Vec<f64>, f64)], lambda: f64) -> f64 {
    let reg = 0.5 * lambda * dot(w, w);
    let hinge: f64 = rows
        .iter()
        .map(|(x, y)| (1.0 - y * dot(w, x)).max(0.0))
        .sum();
    reg + hinge / rows.len() as f64
}

/// Regularized hinge objective of a model on a labeled set, using the
/// model's own standardization. Useful for descent sanity checks.
pub fn objective_on(
    model: &LinearModel,
    instances: &[(FeatureVector, Polarity)],
) -> Result<f64> {
    let rows: Vec<(Vec<f64>, f64)> = instances
        .iter()
        .map(|(fv, p)| {
            let mut x = model.standardized(fv)?;
            x.push(1.0);
            Ok((x, polarity_sign(*p)))
        })
        .collect::<Result<_>>()?;
    let mut w = model.weights.clone();
    w.push(model.bias);
    Ok(hinge_objective(&w, &rows, model.config.lambda))
}

/// Decision score: weights applied to the standardized features, plus
/// the bias. Positive scores lean Good.
pub fn score(model: &LinearModel, fv: &FeatureVector) -> Result<f64> {
    let x = model.standardized(fv)?;
    Ok(dot(&model.weights, &x) + model.bias)
}

/// Score a thread's comments and sort them by score descending. The
/// input order is the chronological thread order, which also breaks
/// ties (stable sort), so the ranking is deterministic.
pub fn rank_thread(
    model: &LinearModel,
    thread_features: &[(String, FeatureVector)],
) -> Result<Vec<(String, f64)>> {
    let mut scored: Vec<(String, f64)> = thread_features
        .iter()
        .map(|(id, fv)| Ok((id.clone(), score(model, fv)?)))
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("scores are finite"));
    Ok(scored)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha20Rng;

    /// A schema-free stand-in: tests only need vector lengths to agree,
    /// so build a schema of the right size via categories.
    fn schema_of_len(len: usize) -> FeatureSchema {
        use crate::features::FIXED_FEATURE_NAMES;
        assert!(len >= FIXED_FEATURE_NAMES.len());
        FeatureSchema::new((0..len - FIXED_FEATURE_NAMES.len()).map(|i| alloc::format!("c{i}")))
    }

    /// Embed a low-dimensional point into a full-width feature vector
    /// (extra slots zero).
    fn fv(schema: &FeatureSchema, point: &[f64]) -> FeatureVector {
        let mut values = vec![0.0; schema.len()];
        values[..point.len()].copy_from_slice(point);
        FeatureVector::new(schema, values).unwrap()
    }

    /// Two separated clouds in the first two feature slots.
    fn separable(
        schema: &FeatureSchema,
        n_per_class: usize,
        seed: u64,
    ) -> Vec<(FeatureVector, Polarity)> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for _ in 0..n_per_class {
            let x = rng.gen_range(-0.5..0.5);
            let y = rng.gen_range(-0.5..0.5);
            out.push((fv(schema, &[3.0 + x, 3.0 + y]), Polarity::Good));
            out.push((fv(schema, &[-3.0 + x, -3.0 + y]), Polarity::Bad));
        }
        out
    }

    fn accuracy(model: &LinearModel, data: &[(FeatureVector, Polarity)]) -> f64 {
        let correct = data
            .iter()
            .filter(|(x, p)| {
                let s = score(model, x).unwrap();
                (s > 0.0) == (*p == Polarity::Good)
            })
            .count();
        correct as f64 / data.len() as f64
    }

    fn cfg(lambda: f64, epochs: usize, seed: u64) -> TrainConfig {
        TrainConfig { lambda, epochs, seed }
    }

    #[test]
    fn separable_data_reaches_full_training_accuracy() {
        let schema = schema_of_len(24);
        let data = separable(&schema, 50, 1);
        let model = train(&data, &schema, &cfg(1e-3, 30, 7)).unwrap();
        assert_eq!(accuracy(&model, &data), 1.0);
    }

    #[test]
    fn duplicated_instances_keep_decision_signs() {
        let schema = schema_of_len(24);
        let data = separable(&schema, 30, 2);
        let doubled: Vec<_> = data.iter().chain(data.iter()).cloned().collect();
        let m1 = train(&data, &schema, &cfg(1e-3, 30, 3)).unwrap();
        let m2 = train(&doubled, &schema, &cfg(1e-3, 30, 3)).unwrap();
        for (x, _) in &data {
            let s1 = score(&m1, x).unwrap();
            let s2 = score(&m2, x).unwrap();
            assert_eq!(s1 > 0.0, s2 > 0.0);
        }
    }

    #[test]
    fn objective_not_worse_than_zero_weights() {
        // At w = 0 the objective is exactly the mean hinge loss = 1.
        let schema = schema_of_len(24);
        let data = separable(&schema, 40, 4);
        let model = train(&data, &schema, &cfg(1e-3, 30, 5)).unwrap();
        assert!(model.objective() <= 1.0 + 1e-9, "objective {}", model.objective());
        assert_abs_diff_eq!(
            objective_on(&model, &data).unwrap(),
            model.objective(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn single_class_rejected() {
        let schema = schema_of_len(24);
        let data: Vec<_> = (0..5)
            .map(|i| (fv(&schema, &[i as f64]), Polarity::Good))
            .collect();
        assert_eq!(
            train(&data, &schema, &cfg(1e-3, 5, 0)).unwrap_err(),
            Error::SingleClass
        );
    }

    #[test]
    fn score_with_known_weights() {
        let schema = schema_of_len(24);
        let identity: Vec<Scaler> = (0..schema.len())
            .map(|_| Scaler { mean: 0.0, std: 1.0 })
            .collect();
        let mut weights = vec![0.0; schema.len()];
        let zero = LinearModel::from_parts(
            schema.clone(),
            identity.clone(),
            weights.clone(),
            0.0,
            cfg(1e-3, 1, 0),
            0.0,
        )
        .unwrap();
        assert_eq!(score(&zero, &fv(&schema, &[7.0, -3.0])).unwrap(), 0.0);

        weights[0] = 1.0;
        let unit = LinearModel::from_parts(schema.clone(), identity, weights, 0.0, cfg(1e-3, 1, 0), 0.0)
            .unwrap();
        assert_eq!(score(&unit, &fv(&schema, &[2.0, 5.0])).unwrap(), 2.0);
        // Schema mismatch is rejected.
        let longer = schema_of_len(25);
        assert!(score(&unit, &fv(&longer, &[1.0])).is_err());
    }

    #[test]
    fn rank_thread_orders_and_breaks_ties_by_input_order() {
        let schema = schema_of_len(24);
        let identity: Vec<Scaler> = (0..schema.len())
            .map(|_| Scaler { mean: 0.0, std: 1.0 })
            .collect();
        let mut weights = vec![0.0; schema.len()];
        weights[0] = 1.0;
        let model =
            LinearModel::from_parts(schema.clone(), identity, weights, 0.0, cfg(1e-3, 1, 0), 0.0)
                .unwrap();
        let feats = vec![
            ("c1".to_string(), fv(&schema, &[0.2])),
            ("c2".to_string(), fv(&schema, &[0.9])),
            ("c3".to_string(), fv(&schema, &[0.2])),
        ];
        let ranked = rank_thread(&model, &feats).unwrap();
        let ids: Vec<&str> = ranked.iter().map(|(id, _)| id.as_str()).collect();
        assert_eq!(ids, vec!["c2", "c1", "c3"]);

        let single = rank_thread(&model, &feats[..1]).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].0, "c1");
    }

    #[test]
    fn training_is_deterministic() {
        let schema = schema_of_len(24);
        let data = separable(&schema, 25, 9);
        let m1 = train(&data, &schema, &cfg(1e-3, 15, 11)).unwrap();
        let m2 = train(&data, &schema, &cfg(1e-3, 15, 11)).unwrap();
        assert_eq!(m1, m2);
    }

    #[test]
    fn constant_feature_shift_leaves_scores_unchanged() {
        let schema = schema_of_len(24);
        let data = separable(&schema, 30, 12);
        let shifted: Vec<_> = data
            .iter()
            .map(|(x, p)| {
                let mut values = x.values().to_vec();
                values[1] += 17.25;
                (FeatureVector::new(&schema, values).unwrap(), *p)
            })
            .collect();
        let m1 = train(&data, &schema, &cfg(1e-3, 20, 13)).unwrap();
        let m2 = train(&shifted, &schema, &cfg(1e-3, 20, 13)).unwrap();
        for ((a, _), (b, _)) in data.iter().zip(&shifted) {
            let s1 = score(&m1, a).unwrap();
            let s2 = score(&m2, b).unwrap();
            assert_abs_diff_eq!(s1, s2, epsilon = 1e-9);
        }
    }

    #[test]
    fn positive_rescaling_leaves_ranking_unchanged() {
        // Powers of two scale the whole computation exactly, so even the
        // SGD trajectory is bit-identical.
        let schema = schema_of_len(24);
        let data = separable(&schema, 30, 14);
        let scaled: Vec<_> = data
            .iter()
            .map(|(x, p)| {
                let values = x.values().iter().map(|v| v * 4.0).collect();
                (FeatureVector::new(&schema, values).unwrap(), *p)
            })
            .collect();
        let m1 = train(&data, &schema, &cfg(1e-3, 20, 15)).unwrap();
        let m2 = train(&scaled, &schema, &cfg(1e-3, 20, 15)).unwrap();
        let feats1: Vec<_> = data
            .iter()
            .enumerate()
            .map(|(i, (x, _))| (alloc::format!("c{i}"), x.clone()))
            .collect();
        let feats2: Vec<_> = scaled
            .iter()
            .enumerate()
            .map(|(i, (x, _))| (alloc::format!("c{i}"), x.clone()))
            .collect();
        let r1 = rank_thread(&m1, &feats1).unwrap();
        let r2 = rank_thread(&m2, &feats2).unwrap();
        let ids1: Vec<&str> = r1.iter().map(|(id, _)| id.as_str()).collect();
        let ids2: Vec<&str> = r2.iter().map(|(id, _)| id.as_str()).collect();
        assert_eq!(ids1, ids2);
    }

    #[test]
    fn weight_increase_respects_feature_dominance() {
        // If A exceeds B on feature j and nothing else differs, growing
        // w_j never drops A below B.
        let schema = schema_of_len(24);
        let identity: Vec<Scaler> = (0..schema.len())
            .map(|_| Scaler { mean: 0.0, std: 1.0 })
            .collect();
        let a = fv(&schema, &[2.0, 1.0]);
        let b = fv(&schema, &[1.0, 1.0]);
        let mut prev_gap = f64::NEG_INFINITY;
        for wj in [0.0, 0.5, 1.0, 2.0, 8.0] {
            let mut weights = vec![0.0; schema.len()];
            weights[0] = wj;
            weights[1] = -0.3;
            let model = LinearModel::from_parts(
                schema.clone(),
                identity.clone(),
                weights,
                0.1,
                cfg(1e-3, 1, 0),
                0.0,
            )
            .unwrap();
            let gap = score(&model, &a).unwrap() - score(&model, &b).unwrap();
            assert!(gap >= prev_gap);
            assert!(gap >= 0.0);
            prev_gap = gap;
        }
    }
}
