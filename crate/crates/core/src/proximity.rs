//! Common-neighbor and degree-penalized proximity matrices.
//!
//! `C = AᵀA − diag(AᵀA)` counts shared neighbors, `C′ = C + A` adds first
//! order proximity and `W = D^{−β} C′ D^{−β}` applies the degree penalty.
//! The explicit matrices densify around hubs, so besides the materialized
//! forms this module offers a per-row builder and a matrix-free operator
//! that evaluates `W·x` through two sparse products with `A`.

use log::debug;

use crate::eigen::SymmetricOperator;
use crate::graph::Graph;
use crate::sparse::SparseMatrix;

/// Per-vertex degree penalty `d^{−β}`.
pub fn degree_penalty(g: &Graph, beta: f64) -> Vec<f64> {
    (0..g.n()).map(|v| (g.degree(v) as f64).powf(-beta)).collect()
}

/// Sparse accumulator reused across row computations.
struct RowAccumulator {
    values: Vec<f64>,
    touched: Vec<usize>,
}

impl RowAccumulator {
    fn new(n: usize) -> Self {
        RowAccumulator { values: vec![0.0; n], touched: Vec::new() }
    }

    fn add(&mut self, j: usize, v: f64) {
        if self.values[j] == 0.0 {
            self.touched.push(j);
        }
        self.values[j] += v;
    }

    fn drain(&mut self) -> Vec<(usize, f64)> {
        self.touched.sort_unstable();
        let out = self.touched.iter().map(|&j| (j, self.values[j])).collect();
        for &j in &self.touched {
            self.values[j] = 0.0;
        }
        self.touched.clear();
        out
    }

    fn common_neighbors(&mut self, g: &Graph, i: usize, with_adjacency: bool) -> Vec<(usize, f64)> {
        for &l in g.neighbors(i) {
            if with_adjacency {
                self.add(l, 1.0);
            }
            for &j in g.neighbors(l) {
                if j != i {
                    self.add(j, 1.0);
                }
            }
        }
        self.drain()
    }
}

fn build(g: &Graph, with_adjacency: bool) -> SparseMatrix {
    let mut acc = RowAccumulator::new(g.n());
    let rows = (0..g.n()).map(|i| acc.common_neighbors(g, i, with_adjacency)).collect();
    let m = SparseMatrix::from_rows(g.n(), rows);
    debug!("proximity matrix: n={} nnz={} density={:.4}", m.dim(), m.nnz(), m.density());
    m
}

/// `C_ij = |adj(i) ∩ adj(j)|` for `i ≠ j`, zero diagonal.
pub fn common_neighbor_matrix(g: &Graph) -> SparseMatrix {
    build(g, false)
}

/// `C′ = C + A`.
pub fn proximity_matrix(g: &Graph) -> SparseMatrix {
    build(g, true)
}

/// `W_ij = C′_ij / (D_ii·D_jj)^β`.
pub fn penalized_weight_matrix(g: &Graph, beta: f64) -> SparseMatrix {
    let pen = degree_penalty(g, beta);
    proximity_matrix(g).scale(&pen, &pen)
}

/// Row `i` of `C′` computed on demand, sorted by column.
pub fn proximity_row(g: &Graph, i: usize) -> Vec<(usize, f64)> {
    RowAccumulator::new(g.n()).common_neighbors(g, i, true)
}

/// Matrix-free `W` (or plain `A` when `adjacency_only`).
///
/// `W·x = P (A·A·y − D∘y + A·y)` with `y = P·x` and `P = D^{−β}`, since the
/// diagonal of `AᵀA` is the degree vector.
pub struct ProximityOperator<'a> {
    graph: &'a Graph,
    penalty: Vec<f64>,
    adjacency_only: bool,
}

impl<'a> ProximityOperator<'a> {
    pub fn penalized(graph: &'a Graph, beta: f64) -> Self {
        ProximityOperator { graph, penalty: degree_penalty(graph, beta), adjacency_only: false }
    }

    pub fn adjacency(graph: &'a Graph) -> Self {
        ProximityOperator { graph, penalty: vec![1.0; graph.n()], adjacency_only: true }
    }

    fn adjacency_apply(&self, x: &[f64], y: &mut [f64]) {
        for (v, yv) in y.iter_mut().enumerate() {
            *yv = self.graph.neighbors(v).iter().map(|&w| x[w]).sum();
        }
    }

    /// `W·1`, the weighted degree of every vertex.
    pub fn row_sums(&self) -> Vec<f64> {
        let ones = vec![1.0; self.graph.n()];
        let mut out = vec![0.0; self.graph.n()];
        self.apply(&ones, &mut out);
        out
    }
}

impl SymmetricOperator for ProximityOperator<'_> {
    fn dim(&self) -> usize {
        self.graph.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        if self.adjacency_only {
            self.adjacency_apply(x, y);
            return;
        }
        let n = self.graph.n();
        let scaled: Vec<f64> = x.iter().zip(&self.penalty).map(|(a, p)| a * p).collect();
        let mut once = vec![0.0; n];
        self.adjacency_apply(&scaled, &mut once);
        self.adjacency_apply(&once, y);
        for v in 0..n {
            let deg = self.graph.degree(v) as f64;
            y[v] = self.penalty[v] * (y[v] - deg * scaled[v] + once[v]);
        }
    }
}
