//! Skip-gram with hierarchical softmax.
//!
//! Each center vertex `v_i` predicts every vertex within `window` positions
//! of it in the same walk, with `Pr(v_j | u_i)` factorized along the Huffman
//! path of `v_j`.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};

use super::huffman::{dot, log_sigmoid, sigmoid, HuffmanTree};
use super::walks::WalkCorpus;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkipGramConfig {
    pub k: usize,
    pub window: usize,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    pub seed: u64,
    /// Single worker, bit-reproducible. Otherwise `workers` threads update
    /// shared vectors without locks.
    pub deterministic: bool,
    pub workers: usize,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        SkipGramConfig {
            k: 200,
            window: 5,
            epochs: 1,
            lr_start: 0.025,
            lr_end: 0.0001,
            seed: 0,
            deterministic: true,
            workers: 1,
        }
    }
}

impl SkipGramConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.window == 0 || self.epochs == 0 {
            return Err(Error::InvalidConfig("k, window and epochs must be at least 1".into()));
        }
        if !(self.lr_end > 0.0 && self.lr_start >= self.lr_end && self.lr_start.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "need lr_start ≥ lr_end > 0 (got {} and {})",
                self.lr_start, self.lr_end
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SkipGramOutput {
    pub embedding: Embedding,
    /// Mean negative log-likelihood per (center, context) pair, per epoch.
    pub epoch_losses: Vec<f64>,
    /// Vertices that never occur in the corpus; their rows keep their
    /// initial values.
    pub absent_vertices: Vec<usize>,
    pub tree: HuffmanTree,
    /// Internal-node vectors of `tree`, row-major.
    pub node_vectors: Vec<f64>,
}

impl SkipGramOutput {
    /// Model probability `Pr(context | center)`.
    pub fn context_probability(&self, center: usize, context: usize) -> f64 {
        self.tree.leaf_probability(context, self.embedding.row(center), &self.node_vectors)
    }
}

/// Gradient of each internal-node vector on a path, by node index.
pub type NodeGradients = Vec<(usize, Vec<f64>)>;

/// Loss `−ln Pr(leaf | u)` and its gradients with respect to `u` and to each
/// internal-node vector on the path.
pub fn pair_loss_gradient(
    u: &[f64],
    theta: &[f64],
    points: &[u32],
    code: &[u8],
) -> (f64, Vec<f64>, NodeGradients) {
    let k = u.len();
    let mut loss = 0.0;
    let mut grad_u = vec![0.0; k];
    let mut grad_theta = Vec::with_capacity(points.len());
    for (&p, &b) in points.iter().zip(code) {
        let row = &theta[p as usize * k..(p as usize + 1) * k];
        let s = if b == 0 { 1.0 } else { -1.0 };
        let x = s * dot(u, row);
        loss -= log_sigmoid(x);
        let coef = -s * (1.0 - sigmoid(x));
        for (g, t) in grad_u.iter_mut().zip(row) {
            *g += coef * t;
        }
        grad_theta.push((p as usize, u.iter().map(|v| coef * v).collect()));
    }
    (loss, grad_u, grad_theta)
}

/// Row-major parameter buffers shared between training workers.
struct Params {
    input: *mut f64,
    output: *mut f64,
    k: usize,
}

// Workers race on rows by design; every access stays in bounds.
unsafe impl Sync for Params {}
unsafe impl Send for Params {}

impl Params {
    #[allow(clippy::mut_from_ref)]
    unsafe fn input_row(&self, i: usize) -> &mut [f64] {
        std::slice::from_raw_parts_mut(self.input.add(i * self.k), self.k)
    }

    #[allow(clippy::mut_from_ref)]
    unsafe fn output_row(&self, p: usize) -> &mut [f64] {
        std::slice::from_raw_parts_mut(self.output.add(p * self.k), self.k)
    }
}

/// One SGD step on `−ln Pr(leaf | u)`; `neu` is scratch of length k.
fn pair_step(u: &mut [f64], params: &Params, points: &[u32], code: &[u8], lr: f64, neu: &mut [f64]) -> f64 {
    neu.fill(0.0);
    let mut loss = 0.0;
    for (&p, &b) in points.iter().zip(code) {
        // SAFETY: p < internal node count, the output buffer holds that many rows
        let row = unsafe { params.output_row(p as usize) };
        let s = if b == 0 { 1.0 } else { -1.0 };
        let x = s * dot(u, row);
        loss -= log_sigmoid(x);
        let g = lr * s * (1.0 - sigmoid(x));
        for ((e, r), v) in neu.iter_mut().zip(row.iter_mut()).zip(u.iter()) {
            *e += g * *r;
            *r += g * v;
        }
    }
    for (v, e) in u.iter_mut().zip(neu.iter()) {
        *v += e;
    }
    loss
}

struct Schedule {
    lr_start: f64,
    lr_end: f64,
    total: f64,
}

impl Schedule {
    fn lr(&self, processed: u64) -> f64 {
        let frac = (processed as f64 / self.total).min(1.0);
        (self.lr_start - (self.lr_start - self.lr_end) * frac).max(self.lr_end)
    }
}

/// Trains over `walks`, returning summed loss and pair count.
fn train_walks(
    walks: &[Vec<usize>],
    tree: &HuffmanTree,
    params: &Params,
    window: usize,
    schedule: &Schedule,
    processed: &AtomicU64,
) -> (f64, u64) {
    let mut neu = vec![0.0; params.k];
    let mut loss = 0.0;
    let mut pairs = 0u64;
    for walk in walks {
        let base = processed.fetch_add(walk.len() as u64, Ordering::Relaxed);
        for (i, &center) in walk.iter().enumerate() {
            let lr = schedule.lr(base + i as u64);
            // SAFETY: center < n, the input buffer holds n rows
            let u = unsafe { params.input_row(center) };
            let lo = i.saturating_sub(window);
            let hi = (i + window + 1).min(walk.len());
            for (j, &ctx) in walk.iter().enumerate().take(hi).skip(lo) {
                if j == i {
                    continue;
                }
                loss += pair_step(u, params, tree.points(ctx), tree.code(ctx), lr, &mut neu);
                pairs += 1;
            }
        }
    }
    (loss, pairs)
}

pub fn train_skipgram(corpus: &WalkCorpus, cfg: &SkipGramConfig) -> Result<SkipGramOutput> {
    cfg.validate()?;
    let n = corpus.n();
    if n == 0 || corpus.tokens() == 0 {
        return Err(Error::InsufficientData("empty walk corpus".into()));
    }
    let k = cfg.k;
    let tree = HuffmanTree::new(&corpus.vertex_frequency);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let half = 0.5 / k as f64;
    let mut input: Vec<f64> = (0..n * k).map(|_| rng.gen_range(-half..half)).collect();
    let mut output = vec![0.0; tree.internal_nodes().max(1) * k];
    let params = Params { input: input.as_mut_ptr(), output: output.as_mut_ptr(), k };

    let schedule = Schedule {
        lr_start: cfg.lr_start,
        lr_end: cfg.lr_end,
        total: (corpus.tokens() * cfg.epochs as u64) as f64,
    };
    let processed = AtomicU64::new(0);
    let workers = if cfg.deterministic { 1 } else { cfg.workers.max(1) };
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let (loss, pairs) = if workers == 1 {
            train_walks(&corpus.walks, &tree, &params, cfg.window, &schedule, &processed)
        } else {
            let chunk = corpus.walks.len().div_ceil(workers);
            std::thread::scope(|scope| {
                let handles: Vec<_> = corpus
                    .walks
                    .chunks(chunk)
                    .map(|c| {
                        let (tree, params, schedule, processed) = (&tree, &params, &schedule, &processed);
                        scope.spawn(move || train_walks(c, tree, params, cfg.window, schedule, processed))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("training worker panicked"))
                    .fold((0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
            })
        };
        let mean = if pairs == 0 { 0.0 } else { loss / pairs as f64 };
        log::debug!("skip-gram epoch {}: mean loss {mean:.6} over {pairs} pairs", epoch + 1);
        epoch_losses.push(mean);
    }

    let absent_vertices: Vec<usize> = (0..n).filter(|&v| corpus.vertex_frequency[v] == 0).collect();
    if !absent_vertices.is_empty() {
        log::warn!("{} vertices never occur in the walks and keep their initial vectors", absent_vertices.len());
    }
    Ok(SkipGramOutput {
        embedding: Embedding::from_flat(n, k, input)?,
        epoch_losses,
        absent_vertices,
        tree,
        node_vectors: output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(n: usize, walks: Vec<Vec<usize>>) -> WalkCorpus {
        WalkCorpus::from_walks(n, walks).unwrap()
    }

    #[test]
    fn leaf_probabilities_partition_unity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 5, 17, 64] {
            let freq: Vec<u64> = (0..n).map(|_| rng.gen_range(0..20)).collect();
            let tree = HuffmanTree::new(&freq);
            let k = 4;
            let theta: Vec<f64> = (0..tree.internal_nodes() * k).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let u: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let total: f64 = (0..n).map(|l| tree.leaf_probability(l, &u, &theta)).sum();
            assert!((total - 1.0).abs() < 1e-9, "n={n} total={total}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tree = HuffmanTree::new(&[4, 1, 7, 2, 2, 9]);
        let k = 3;
        let theta: Vec<f64> = (0..tree.internal_nodes() * k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let h = 1e-6;
        for leaf in 0..tree.leaves() {
            let (pts, code) = (tree.points(leaf), tree.code(leaf));
            let (_, gu, gt) = pair_loss_gradient(&u, &theta, pts, code);
            for d in 0..k {
                let mut up = u.clone();
                up[d] += h;
                let mut dn = u.clone();
                dn[d] -= h;
                let fd = (pair_loss_gradient(&up, &theta, pts, code).0 - pair_loss_gradient(&dn, &theta, pts, code).0) / (2.0 * h);
                assert!((fd - gu[d]).abs() <= 1e-4 * gu[d].abs().max(1e-3));
            }
            for (p, g) in gt {
                for d in 0..k {
                    let mut tp = theta.clone();
                    tp[p * k + d] += h;
                    let mut tn = theta.clone();
                    tn[p * k + d] -= h;
                    let fd = (pair_loss_gradient(&u, &tp, pts, code).0 - pair_loss_gradient(&u, &tn, pts, code).0) / (2.0 * h);
                    assert!((fd - g[d]).abs() <= 1e-4 * g[d].abs().max(1e-3));
                }
            }
        }
    }

    #[test]
    fn step_is_gradient_descent() {
        let tree = HuffmanTree::new(&[3, 1, 1, 5]);
        let k = 2;
        let mut theta = vec![0.3, -0.2, 0.1, 0.4, -0.5, 0.2];
        let mut u = vec![0.7, -0.1];
        let (loss, gu, gt) = pair_loss_gradient(&u, &theta, tree.points(1), tree.code(1));
        let (u0, t0) = (u.clone(), theta.clone());
        let params = Params { input: u.as_mut_ptr(), output: theta.as_mut_ptr(), k };
        let lr = 0.1;
        let mut neu = vec![0.0; k];
        let mut row = u0.clone();
        let step_loss = pair_step(&mut row, &params, tree.points(1), tree.code(1), lr, &mut neu);
        assert!((step_loss - loss).abs() < 1e-15);
        for d in 0..k {
            assert!((row[d] - (u0[d] - lr * gu[d])).abs() < 1e-15);
        }
        for (p, g) in gt {
            for d in 0..k {
                assert!((theta[p * k + d] - (t0[p * k + d] - lr * g[d])).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn repeated_pair_dominates() {
        let walks = vec![[0usize, 1].repeat(50); 20];
        let c = corpus(5, walks);
        let cfg = SkipGramConfig { k: 2, epochs: 5, ..Default::default() };
        let out = train_skipgram(&c, &cfg).unwrap();
        assert_eq!(out.absent_vertices, vec![2, 3, 4]);
        let pb = out.context_probability(0, 1);
        for other in 2..5 {
            assert!(pb > out.context_probability(0, other));
        }
        assert!(out.epoch_losses.last().unwrap() < out.epoch_losses.first().unwrap());
    }

    #[test]
    fn deterministic_runs_match() {
        let walks: Vec<Vec<usize>> = (0..30).map(|i| (0..12).map(|j| (i * 7 + j * 3) % 9).collect()).collect();
        let c = corpus(9, walks);
        let cfg = SkipGramConfig { k: 8, epochs: 2, seed: 5, ..Default::default() };
        let a = train_skipgram(&c, &cfg).unwrap();
        let b = train_skipgram(&c, &cfg).unwrap();
        assert_eq!(a.embedding, b.embedding);
        assert_eq!(a.epoch_losses, b.epoch_losses);
        let h = train_skipgram(&c, &SkipGramConfig { deterministic: false, workers: 3, ..cfg }).unwrap();
        assert!(h.embedding.is_finite());
    }

    #[test]
    fn absent_rows_untouched() {
        let c = corpus(4, vec![vec![0, 1, 0, 1, 2]]);
        let cfg = SkipGramConfig { k: 3, seed: 9, ..Default::default() };
        let out = train_skipgram(&c, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let half = 0.5 / 3.0;
        let init: Vec<f64> = (0..12).map(|_| rng.gen_range(-half..half)).collect();
        assert_eq!(out.absent_vertices, vec![3]);
        assert_eq!(out.embedding.row(3), &init[9..12]);
        assert_ne!(out.embedding.row(0), &init[0..3]);
    }

    #[test]
    fn rejects_bad_config() {
        let c = corpus(2, vec![vec![0, 1]]);
        for cfg in [
            SkipGramConfig { window: 0, ..Default::default() },
            SkipGramConfig { lr_end: 0.0, ..Default::default() },
            SkipGramConfig { lr_start: 0.001, lr_end: 0.01, ..Default::default() },
        ] {
            assert!(train_skipgram(&c, &cfg).is_err());
        }
    }
}
