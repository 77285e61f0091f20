use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

use super::sampler::PenalizedSampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkMode {
    /// Steps follow `C′_ij / (D_ii·D_jj)^β`.
    DpWalker,
    /// Steps are uniform over the current vertex's neighbors.
    DeepwalkBaseline,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WalkConfig {
    pub walks_per_vertex: usize,
    /// Vertices per walk, start included.
    pub walk_length: usize,
    pub beta: f64,
    pub seed: u64,
    pub mode: WalkMode,
    /// Worker threads; the corpus does not depend on it.
    pub workers: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig { walks_per_vertex: 10, walk_length: 40, beta: 1.0, seed: 0, mode: WalkMode::DpWalker, workers: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkCorpus {
    pub walks: Vec<Vec<usize>>,
    pub vertex_frequency: Vec<u64>,
}

impl WalkCorpus {
    pub fn from_walks(n: usize, walks: Vec<Vec<usize>>) -> Result<Self> {
        let mut vertex_frequency = vec![0u64; n];
        for &v in walks.iter().flatten() {
            if v >= n {
                return Err(Error::InvalidConfig(format!("walk vertex {v} out of range for n={n}")));
            }
            vertex_frequency[v] += 1;
        }
        Ok(WalkCorpus { walks, vertex_frequency })
    }

    pub fn n(&self) -> usize {
        self.vertex_frequency.len()
    }

    pub fn tokens(&self) -> u64 {
        self.vertex_frequency.iter().sum()
    }

    /// One walk per line, space-separated original labels.
    pub fn write<W: Write>(&self, labels: &[u64], mut out: W) -> Result<()> {
        for walk in &self.walks {
            let line: Vec<String> = walk.iter().map(|&v| labels[v].to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        out.flush()?;
        Ok(())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of the walk started at `vertex` in pass `pass`.
pub fn walk_seed(seed: u64, vertex: usize, pass: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ vertex as u64) ^ (pass as u64).rotate_left(32))
}

enum Stepper {
    Penalized(PenalizedSampler),
    Uniform,
}

impl Stepper {
    fn walk(&self, g: &Graph, start: usize, length: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut walk = Vec::with_capacity(length);
        walk.push(start);
        let mut v = start;
        for _ in 1..length {
            v = match self {
                Stepper::Penalized(s) => s.step(g, v, rng),
                Stepper::Uniform => {
                    let nb = g.neighbors(v);
                    nb[rng.gen_range(0..nb.len())]
                }
            };
            walk.push(v);
        }
        walk
    }
}

/// `walks_per_vertex` passes over all vertices in seeded shuffled order,
/// one walk of `walk_length` vertices per start.
pub fn generate_walks(g: &Graph, cfg: &WalkConfig) -> Result<WalkCorpus> {
    if cfg.walks_per_vertex == 0 || cfg.walk_length < 2 {
        return Err(Error::InvalidConfig("need walks_per_vertex ≥ 1 and walk_length ≥ 2".into()));
    }
    if !cfg.beta.is_finite() {
        return Err(Error::InvalidConfig("beta must be finite".into()));
    }
    let stepper = match cfg.mode {
        WalkMode::DpWalker => Stepper::Penalized(PenalizedSampler::new(g, cfg.beta)),
        WalkMode::DeepwalkBaseline => Stepper::Uniform,
    };
    let mut jobs = Vec::with_capacity(cfg.walks_per_vertex * g.n());
    for pass in 0..cfg.walks_per_vertex {
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(walk_seed(cfg.seed, usize::MAX, pass)));
        jobs.extend(order.into_iter().map(|v| (v, pass)));
    }

    let run = |chunk: &[(usize, usize)]| -> Vec<Vec<usize>> {
        chunk
            .iter()
            .map(|&(v, pass)| {
                let mut rng = ChaCha8Rng::seed_from_u64(walk_seed(cfg.seed, v, pass));
                stepper.walk(g, v, cfg.walk_length, &mut rng)
            })
            .collect()
    };
    let workers = cfg.workers.max(1);
    let walks = if workers == 1 {
        run(&jobs)
    } else {
        let chunk = jobs.len().div_ceil(workers);
        std::thread::scope(|scope| {
            let handles: Vec<_> = jobs.chunks(chunk).map(|c| scope.spawn(move || run(c))).collect();
            handles.into_iter().flat_map(|h| h.join().expect("walk worker panicked")).collect()
        })
    };
    WalkCorpus::from_walks(g.n(), walks)
}
