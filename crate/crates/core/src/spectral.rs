//! Degree-penalized spectral embedding.
//!
//! Minimizes `Σ_ij W_ij ‖u_i − u_j‖²` subject to `UᵀDU = I`, where `D` is the
//! diagonal of `W`'s row sums. The minimizers are `D^{−1/2}`-rescaled
//! eigenvectors of `L = I − D^{−1/2} W D^{−1/2}` with the smallest
//! eigenvalues; the trivial eigenvalue-0 direction is discarded. The solver
//! works on `I − L` and extracts its largest eigenpairs.

use log::info;
use serde::{Deserialize, Serialize};

use crate::eigen::{largest_eigenpairs, LanczosConfig, SymmetricOperator};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::proximity::ProximityOperator;
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMode {
    /// Weight matrix `W = D^{−β} C′ D^{−β}`.
    DpSpectral,
    /// Laplacian eigenmaps: weight matrix `A`, `β` ignored.
    LeBaseline,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub k: usize,
    pub beta: f64,
    pub tol: f64,
    /// Matvec budget; `None` means `10·n`.
    pub max_iter: Option<usize>,
    pub mode: SpectralMode,
    /// Seed of the eigensolver start vector.
    pub seed: u64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig { k: 200, beta: 1.0, tol: 1e-8, max_iter: None, mode: SpectralMode::DpSpectral, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    pub embedding: Embedding,
    /// Eigenvalues of the normalized Laplacian for the returned columns, ascending.
    pub eigenvalues: Vec<f64>,
    /// The discarded smallest eigenvalue (≈ 0).
    pub trivial_eigenvalue: f64,
    /// Residuals `‖L t − λ t‖` of the unit eigenvectors.
    pub residuals: Vec<f64>,
    /// Row sums of the weight matrix (the `D` of the constraint).
    pub weighted_degree: Vec<f64>,
    pub matvecs: usize,
}

fn inverse_sqrt_degrees(sums: &[f64]) -> Result<Vec<f64>> {
    sums.iter()
        .enumerate()
        .map(|(v, &s)| if s > 0.0 { Ok(1.0 / s.sqrt()) } else { Err(Error::ZeroRowSum { vertex: v }) })
        .collect()
}

/// `L = I − D^{−1/2} W D^{−1/2}` with `D` the row sums of `w`.
pub fn normalized_laplacian(w: &SparseMatrix, g: &Graph) -> Result<SparseMatrix> {
    if w.dim() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: w.dim() });
    }
    let scale = inverse_sqrt_degrees(&w.row_sums())?;
    let rows = (0..w.dim())
        .map(|i| {
            let mut row: Vec<(usize, f64)> = w.row(i).map(|(j, v)| (j, -v * scale[i] * scale[j])).collect();
            row.push((i, 1.0));
            row
        })
        .collect();
    Ok(SparseMatrix::from_rows(w.dim(), rows))
}

/// `D^{−1/2} W D^{−1/2}` around any weight operator.
struct NormalizedOperator<'a, O> {
    inner: &'a O,
    scale: &'a [f64],
}

impl<O: SymmetricOperator> SymmetricOperator for NormalizedOperator<'_, O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let scaled: Vec<f64> = x.iter().zip(self.scale).map(|(a, s)| a * s).collect();
        self.inner.apply(&scaled, y);
        for (yi, s) in y.iter_mut().zip(self.scale) {
            *yi *= s;
        }
    }
}

/// Learns a `k`-dimensional embedding of `g`.
pub fn embed_spectral(g: &Graph, cfg: &SpectralConfig) -> Result<SpectralEmbedding> {
    let n = g.n();
    if cfg.k == 0 || cfg.k + 2 > n {
        return Err(Error::InvalidConfig(format!("dimension k={} needs 1 ≤ k and k+2 ≤ n={n}", cfg.k)));
    }
    if !cfg.beta.is_finite() {
        return Err(Error::InvalidConfig("beta must be finite".into()));
    }
    // The pattern of C′ contains A, so it is connected exactly when the graph is.
    let components = g.connected_components();
    if components > 1 {
        return Err(Error::Disconnected { components });
    }
    let weights = match cfg.mode {
        SpectralMode::DpSpectral => ProximityOperator::penalized(g, cfg.beta),
        SpectralMode::LeBaseline => ProximityOperator::adjacency(g),
    };
    let sums = weights.row_sums();
    let scale = inverse_sqrt_degrees(&sums)?;
    let op = NormalizedOperator { inner: &weights, scale: &scale };
    let lanczos = LanczosConfig {
        nev: cfg.k + 1,
        tol: cfg.tol,
        max_matvecs: cfg.max_iter.unwrap_or(10 * n),
        seed: cfg.seed,
        basis_size: None,
    };
    let pairs = largest_eigenpairs(&op, &lanczos)?;
    info!(
        "spectral embedding: n={n} k={} mode={:?} beta={} matvecs={}",
        cfg.k, cfg.mode, cfg.beta, pairs.matvecs
    );

    let mut emb = Embedding::zeros(n, cfg.k);
    for (c, t) in pairs.vectors.iter().skip(1).enumerate() {
        for v in 0..n {
            emb.row_mut(v)[c] = t[v] * scale[v];
        }
    }
    Ok(SpectralEmbedding {
        embedding: emb,
        eigenvalues: pairs.values.iter().skip(1).map(|theta| 1.0 - theta).collect(),
        trivial_eigenvalue: 1.0 - pairs.values[0],
        residuals: pairs.residuals[1..].to_vec(),
        weighted_degree: sums,
        matvecs: pairs.matvecs,
    })
}
