//! Link prediction and vertex classification on top of an embedding.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::graph::Graph;

use super::logistic::{logistic_train, LabeledExample, LogisticConfig};

/// Fraction of each class used for training.
pub const TRAIN_FRACTION: f64 = 0.7;
/// Classes with fewer examples are skipped.
pub const MIN_CLASS_SIZE: usize = 5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn record(&mut self, truth: bool, predicted: bool) {
        match (truth, predicted) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.tp + self.fp + self.fn_ + self.tn)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkPredictionReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub confusion: Confusion,
    pub train_pairs: usize,
    pub test_pairs: usize,
}

impl fmt::Display for LinkPredictionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "precision\trecall\tf1")?;
        write!(f, "{:.4}\t{:.4}\t{:.4}", self.precision, self.recall, self.f1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    /// One-vs-rest test accuracy per class.
    pub per_class_accuracy: BTreeMap<usize, f64>,
    /// Test accuracy of the arg-max prediction.
    pub accuracy: f64,
    pub skipped_classes: Vec<usize>,
    pub train_examples: usize,
    pub test_examples: usize,
}

impl fmt::Display for ClassificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "class\taccuracy")?;
        for (c, a) in &self.per_class_accuracy {
            writeln!(f, "{c}\t{a:.4}")?;
        }
        write!(f, "overall\t{:.4}", self.accuracy)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LinkPredictionConfig {
    /// Fraction of edges sampled as positives; as many non-edges are drawn.
    pub sample_fraction: f64,
    pub seed: u64,
    pub logistic: LogisticConfig,
}

impl Default for LinkPredictionConfig {
    fn default() -> Self {
        LinkPredictionConfig { sample_fraction: 0.01, seed: 0, logistic: LogisticConfig::default() }
    }
}

fn split<T: Clone>(items: &[T]) -> (Vec<T>, Vec<T>) {
    let cut = (items.len() as f64 * TRAIN_FRACTION).round() as usize;
    (items[..cut].to_vec(), items[cut..].to_vec())
}

/// Per-coordinate z-scoring fitted on training features.
#[derive(Debug, Clone)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(features: &[Vec<f64>]) -> Self {
        let dim = features.first().map_or(0, |f| f.len());
        let n = features.len().max(1) as f64;
        let mut mean = vec![0.0; dim];
        for f in features {
            for (m, v) in mean.iter_mut().zip(f) {
                *m += v / n;
            }
        }
        let mut var = vec![0.0; dim];
        for f in features {
            for ((s, v), m) in var.iter_mut().zip(f).zip(&mean) {
                *s += (v - m) * (v - m) / n;
            }
        }
        let scale = var.into_iter().map(|v| if v > 0.0 { 1.0 / v.sqrt() } else { 0.0 }).collect();
        Standardizer { mean, scale }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.mean).zip(&self.scale).map(|((v, m), s)| (v - m) * s).collect()
    }
}

/// Vertex pairs by dense index.
pub type Pairs = Vec<(usize, usize)>;

fn difference(emb: &Embedding, (i, j): (usize, usize)) -> Vec<f64> {
    emb.row(i).iter().zip(emb.row(j)).map(|(a, b)| a - b).collect()
}

/// Positive pairs (edges) and the same number of distinct non-edges, each
/// pair ordered `(smaller id, larger id)`.
pub fn sample_pairs(g: &Graph, sample_fraction: f64, rng: &mut ChaCha8Rng) -> Result<(Pairs, Pairs)> {
    if !(sample_fraction > 0.0 && sample_fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!("sample fraction must lie in (0, 1], got {sample_fraction}")));
    }
    let n = g.n();
    let m = g.num_edges();
    let count = (sample_fraction * m as f64).ceil() as usize;
    let non_edges = n * n.saturating_sub(1) / 2 - m;
    if count < 2 || count > non_edges {
        return Err(Error::InsufficientData(format!(
            "cannot sample {count} edges and {count} non-edges from a graph with {m} edges and {non_edges} non-edges"
        )));
    }
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    let (positives, _) = edges.partial_shuffle(rng, count);
    let positives = positives.to_vec();

    let mut seen = HashSet::with_capacity(count);
    let mut negatives = Vec::with_capacity(count);
    while negatives.len() < count {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let pair = (a.min(b), a.max(b));
        if a != b && !g.has_edge(a, b) && seen.insert(pair) {
            negatives.push(pair);
        }
    }
    Ok((positives, negatives))
}

/// Trains on `u_i − u_j` for 70% of the sampled pairs and reports precision,
/// recall and F1 of the edge class on the rest.
pub fn link_prediction_eval(emb: &Embedding, g: &Graph, cfg: &LinkPredictionConfig) -> Result<LinkPredictionReport> {
    if emb.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: emb.n() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (positives, negatives) = sample_pairs(g, cfg.sample_fraction, &mut rng)?;
    let (pos_train, pos_test) = split(&positives);
    let (neg_train, neg_test) = split(&negatives);

    let labeled: Vec<((usize, usize), usize)> =
        pos_train.iter().map(|&p| (p, 1)).chain(neg_train.iter().map(|&p| (p, 0))).collect();
    let raw: Vec<Vec<f64>> = labeled.iter().map(|&(p, _)| difference(emb, p)).collect();
    let scaler = Standardizer::fit(&raw);
    let examples: Vec<LabeledExample> = raw
        .iter()
        .zip(&labeled)
        .map(|(f, &(_, label))| LabeledExample { feature: scaler.apply(f), label })
        .collect();
    let clf = logistic_train(&examples, &cfg.logistic)?;

    let mut confusion = Confusion::default();
    for (pairs, truth) in [(&pos_test, true), (&neg_test, false)] {
        for &p in pairs.iter() {
            confusion.record(truth, clf.predict(&scaler.apply(&difference(emb, p))) == 1);
        }
    }
    Ok(LinkPredictionReport {
        precision: confusion.precision(),
        recall: confusion.recall(),
        f1: confusion.f1(),
        confusion,
        train_pairs: examples.len(),
        test_pairs: pos_test.len() + neg_test.len(),
    })
}

/// Reads `vertex_label class_id` lines; `#` starts a comment line.
pub fn read_labels<R: BufRead>(reader: R) -> Result<Vec<(u64, usize)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let parse_err = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
        let mut it = t.split_whitespace();
        let v = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| parse_err("expected a vertex label"))?;
        let c = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| parse_err("expected a class id"))?;
        if it.next().is_some() {
            return Err(parse_err("expected exactly two fields"));
        }
        out.push((v, c));
    }
    Ok(out)
}

/// Maps labeled vertices onto embedding rows.
pub fn resolve_labels(row_labels: &[u64], labels: &[(u64, usize)]) -> Result<Vec<(usize, usize)>> {
    let index: std::collections::HashMap<u64, usize> = row_labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    labels
        .iter()
        .map(|&(v, c)| index.get(&v).map(|&row| (row, c)).ok_or(Error::UnknownLabel(v)))
        .collect()
}

/// One-vs-rest classification on embedding rows, with a per-class
/// stratified 70/30 split. `labels` pairs row indices with classes.
pub fn vertex_classification_eval(emb: &Embedding, labels: &[(usize, usize)], cfg: &LogisticConfig) -> Result<ClassificationReport> {
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(row, c) in labels {
        if row >= emb.n() {
            return Err(Error::DimensionMismatch { expected: emb.n(), got: row + 1 });
        }
        by_class.entry(c).or_default().push(row);
    }
    let mut skipped_classes = Vec::new();
    by_class.retain(|&c, rows| {
        if rows.len() < MIN_CLASS_SIZE {
            log::warn!("class {c} has {} examples, fewer than {MIN_CLASS_SIZE}; skipped", rows.len());
            skipped_classes.push(c);
            false
        } else {
            true
        }
    });
    if by_class.len() < 2 {
        return Err(Error::InsufficientData("fewer than two classes with enough examples".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (&c, rows) in by_class.iter_mut() {
        rows.shuffle(&mut rng);
        let (a, b) = split(rows);
        train.extend(a.into_iter().map(|r| (r, c)));
        test.extend(b.into_iter().map(|r| (r, c)));
    }
    let raw: Vec<Vec<f64>> = train.iter().map(|&(r, _)| emb.row(r).to_vec()).collect();
    let scaler = Standardizer::fit(&raw);
    let examples: Vec<LabeledExample> =
        raw.iter().zip(&train).map(|(f, &(_, c))| LabeledExample { feature: scaler.apply(f), label: c }).collect();
    let clf = logistic_train(&examples, cfg)?;
    let test_features: Vec<Vec<f64>> = test.iter().map(|&(r, _)| scaler.apply(emb.row(r))).collect();

    let mut per_class = BTreeMap::new();
    for &c in by_class.keys() {
        let mut conf = Confusion::default();
        for (x, &(_, truth)) in test_features.iter().zip(&test) {
            let p = clf.probability(x, c).expect("class seen in training");
            conf.record(truth == c, p > 0.5);
        }
        per_class.insert(c, conf.accuracy());
    }
    let correct = test_features.iter().zip(&test).filter(|(x, &(_, c))| clf.predict(x) == c).count();
    Ok(ClassificationReport {
        per_class_accuracy: per_class,
        accuracy: ratio(correct, test.len()),
        skipped_classes,
        train_examples: train.len(),
        test_examples: test.len(),
    })
}
