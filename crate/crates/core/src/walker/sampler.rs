//! Transition laws for degree-penalized and uniform random walks.

use rand::Rng;

use crate::graph::Graph;
use crate::proximity::{degree_penalty, proximity_row};

/// Alias tables for many small discrete distributions stored back to back.
#[derive(Debug, Clone)]
pub struct AliasTables {
    offsets: Vec<usize>,
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl AliasTables {
    pub fn new() -> Self {
        AliasTables { offsets: vec![0], prob: Vec::new(), alias: Vec::new() }
    }

    /// Appends a table for `weights` (non-negative, not all zero) using
    /// Vose's method.
    pub fn push(&mut self, weights: &[f64]) {
        let n = weights.len();
        let total: f64 = weights.iter().sum();
        let base = self.prob.len();
        let mut scaled: Vec<f64> = if total > 0.0 {
            weights.iter().map(|w| w * n as f64 / total).collect()
        } else {
            vec![1.0; n]
        };
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let mut small: Vec<usize> = Vec::new();
        let mut large: Vec<usize> = Vec::new();
        for (i, &s) in scaled.iter().enumerate() {
            if s < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            alias[s] = l as u32;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        for i in large.into_iter().chain(small) {
            scaled[i] = 1.0;
        }
        self.prob.extend(scaled);
        self.alias.extend(alias);
        self.offsets.push(base + n);
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Draws an index into table `t`.
    pub fn sample<R: Rng + ?Sized>(&self, t: usize, rng: &mut R) -> usize {
        let start = self.offsets[t];
        let n = self.offsets[t + 1] - start;
        let i = rng.gen_range(0..n);
        if rng.gen::<f64>() < self.prob[start + i] {
            i
        } else {
            self.alias[start + i] as usize
        }
    }
}

impl Default for AliasTables {
    fn default() -> Self {
        Self::new()
    }
}

/// Exact next-step law from `v`: `Pr(j | v) ∝ C′_vj / (D_vv·D_jj)^β`, as a
/// sorted list over the support.
pub fn transition_distribution(g: &Graph, beta: f64, v: usize) -> Vec<(usize, f64)> {
    let dv = (g.degree(v) as f64).powf(-beta);
    let mut row: Vec<(usize, f64)> = proximity_row(g, v)
        .into_iter()
        .map(|(j, c)| (j, c * dv * (g.degree(j) as f64).powf(-beta)))
        .collect();
    let total: f64 = row.iter().map(|(_, w)| w).sum();
    for (_, w) in row.iter_mut() {
        *w /= total;
    }
    row
}

/// Samples walk steps from the degree-penalized law without materializing
/// two-hop rows.
///
/// With `p_j = D_jj^{−β}`, the unnormalized weight of `j` from `v` is
/// `p_j·(A_vj + Σ_l A_vl A_lj [j ≠ v])`, a mixture of one "direct" component
/// over `adj(v)` and one component per neighbor `l` over `adj(l) \ {v}`,
/// each of them drawing `j` proportionally to `p_j`. The mixture is picked
/// from a per-vertex table, then `j` from the chosen vertex's neighbor table,
/// rejecting `v` itself in two-hop components.
#[derive(Debug, Clone)]
pub struct PenalizedSampler {
    mixture: AliasTables,
    neighbor: AliasTables,
}

impl PenalizedSampler {
    pub fn new(g: &Graph, beta: f64) -> Self {
        let pen = degree_penalty(g, beta);
        let mut neighbor = AliasTables::new();
        let mut mass = vec![0.0; g.n()];
        for v in 0..g.n() {
            let weights: Vec<f64> = g.neighbors(v).iter().map(|&j| pen[j]).collect();
            mass[v] = weights.iter().sum();
            neighbor.push(&weights);
        }
        let mut mixture = AliasTables::new();
        let mut weights = Vec::new();
        for v in 0..g.n() {
            weights.clear();
            weights.push(mass[v]);
            for &l in g.neighbors(v) {
                weights.push(if g.degree(l) > 1 { (mass[l] - pen[v]).max(0.0) } else { 0.0 });
            }
            mixture.push(&weights);
        }
        PenalizedSampler { mixture, neighbor }
    }

    pub fn step<R: Rng + ?Sized>(&self, g: &Graph, v: usize, rng: &mut R) -> usize {
        let component = self.mixture.sample(v, rng);
        if component == 0 {
            return g.neighbors(v)[self.neighbor.sample(v, rng)];
        }
        let via = g.neighbors(v)[component - 1];
        if g.degree(via) == 1 {
            // zero-weight component, only reachable through alias rounding
            return g.neighbors(v)[self.neighbor.sample(v, rng)];
        }
        loop {
            let j = g.neighbors(via)[self.neighbor.sample(via, rng)];
            if j != v {
                return j;
            }
        }
    }
}
