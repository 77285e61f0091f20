//! L2-regularized logistic regression trained by seeded SGD.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub feature: Vec<f64>,
    pub label: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub l2: f64,
    pub epochs: usize,
    /// Step size of the first epoch; epoch `t` uses `lr/√t`.
    pub lr: f64,
    pub seed: u64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig { l2: 1e-4, epochs: 50, lr: 0.1, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl BinaryModel {
    pub fn margin(&self, x: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    /// Probability of the positive class.
    pub fn probability(&self, x: &[f64]) -> f64 {
        sigmoid(self.margin(x))
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Mean log-loss plus `l2/2·‖w‖²` (the bias is not penalized).
pub fn logistic_loss(model: &BinaryModel, features: &[Vec<f64>], targets: &[bool], l2: f64) -> f64 {
    let data: f64 = features
        .iter()
        .zip(targets)
        .map(|(x, &y)| {
            let z = model.margin(x);
            if y {
                softplus(-z)
            } else {
                softplus(z)
            }
        })
        .sum();
    data / features.len() as f64 + 0.5 * l2 * model.weights.iter().map(|w| w * w).sum::<f64>()
}

/// Gradient of [`logistic_loss`] as `(∂w, ∂b)`.
pub fn logistic_gradient(model: &BinaryModel, features: &[Vec<f64>], targets: &[bool], l2: f64) -> (Vec<f64>, f64) {
    let n = features.len() as f64;
    let mut gw: Vec<f64> = model.weights.iter().map(|w| l2 * w).collect();
    let mut gb = 0.0;
    for (x, &y) in features.iter().zip(targets) {
        let r = (model.probability(x) - if y { 1.0 } else { 0.0 }) / n;
        gb += r;
        for (g, v) in gw.iter_mut().zip(x) {
            *g += r * v;
        }
    }
    (gw, gb)
}

/// Trains one binary model; returns it with the loss after each epoch.
pub fn train_binary(features: &[Vec<f64>], targets: &[bool], cfg: &LogisticConfig) -> Result<(BinaryModel, Vec<f64>)> {
    if features.is_empty() || features.len() != targets.len() {
        return Err(Error::InsufficientData("need as many targets as features, at least one".into()));
    }
    if !targets.iter().any(|&t| t) || targets.iter().all(|&t| t) {
        return Err(Error::InsufficientData("training data contains a single class".into()));
    }
    let dim = features[0].len();
    if let Some(bad) = features.iter().find(|x| x.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
    }
    if features.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("features must be finite".into()));
    }
    let mut model = BinaryModel { weights: vec![0.0; dim], bias: 0.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..features.len()).collect();
    let mut losses = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        let lr = cfg.lr / (epoch as f64).sqrt();
        order.shuffle(&mut rng);
        for &i in &order {
            let x = &features[i];
            let r = model.probability(x) - if targets[i] { 1.0 } else { 0.0 };
            for (w, v) in model.weights.iter_mut().zip(x) {
                *w -= lr * (r * v + cfg.l2 * *w);
            }
            model.bias -= lr * r;
        }
        losses.push(logistic_loss(&model, features, targets, cfg.l2));
    }
    Ok((model, losses))
}

/// A binary model for two classes, one-vs-rest models otherwise.
#[derive(Debug, Clone)]
pub struct LogisticClassifier {
    /// Sorted distinct classes seen in training.
    pub classes: Vec<usize>,
    /// One model for two classes (positive = `classes[1]`), else one per class.
    pub models: Vec<BinaryModel>,
    /// Per model, training loss after each epoch.
    pub losses: Vec<Vec<f64>>,
}

impl LogisticClassifier {
    pub fn predict(&self, x: &[f64]) -> usize {
        if self.models.len() == 1 {
            return self.classes[(self.models[0].margin(x) > 0.0) as usize];
        }
        let best = (0..self.models.len())
            .max_by(|&a, &b| self.models[a].margin(x).total_cmp(&self.models[b].margin(x)).then(b.cmp(&a)))
            .unwrap();
        self.classes[best]
    }

    /// Score of `class` for `x`: its one-vs-rest probability, or for two
    /// classes the probability of that class.
    pub fn probability(&self, x: &[f64], class: usize) -> Option<f64> {
        let idx = self.classes.iter().position(|&c| c == class)?;
        if self.models.len() == 1 {
            let p = self.models[0].probability(x);
            Some(if idx == 1 { p } else { 1.0 - p })
        } else {
            Some(self.models[idx].probability(x))
        }
    }
}

pub fn logistic_train(examples: &[LabeledExample], cfg: &LogisticConfig) -> Result<LogisticClassifier> {
    let mut classes: Vec<usize> = examples.iter().map(|e| e.label).collect();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::InsufficientData("logistic regression needs at least two classes".into()));
    }
    let features: Vec<Vec<f64>> = examples.iter().map(|e| e.feature.clone()).collect();
    let positives: Vec<usize> = if classes.len() == 2 { vec![classes[1]] } else { classes.clone() };
    let mut models = Vec::with_capacity(positives.len());
    let mut losses = Vec::with_capacity(positives.len());
    for &c in &positives {
        let targets: Vec<bool> = examples.iter().map(|e| e.label == c).collect();
        let (m, l) = train_binary(&features, &targets, cfg)?;
        models.push(m);
        losses.push(l);
    }
    Ok(LogisticClassifier { classes, models, losses })
}
