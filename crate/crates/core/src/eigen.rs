//! Largest eigenpairs of sparse symmetric operators.
//!
//! Thick-restart Lanczos with full (two-pass) reorthogonalization. The
//! projected matrix is rebuilt column by column from explicit projections,
//! so after a restart the arrowhead coupling between kept Ritz vectors and
//! the residual direction falls out of the same code path.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// A real symmetric linear map `y = M·x`.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymmetricOperator for SparseMatrix {
    fn dim(&self) -> usize {
        SparseMatrix::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}

#[derive(Debug, Clone)]
pub struct LanczosConfig {
    /// Number of wanted eigenpairs.
    pub nev: usize,
    /// Residual bound `‖M·t − θ·t‖ ≤ tol` for unit `t`.
    pub tol: f64,
    /// Operator application budget.
    pub max_matvecs: usize,
    /// Seed of the random start vector.
    pub seed: u64,
    /// Krylov basis size; defaults to `max(2·nev + 20, nev + 40)` capped at `n`.
    pub basis_size: Option<usize>,
}

/// Eigenpairs sorted by descending eigenvalue.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// Explicit residual norms `‖M·t − θ·t‖`.
    pub residuals: Vec<f64>,
    pub matvecs: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Removes the components of `w` along `basis` (two classical Gram-Schmidt
/// passes) and returns the accumulated coefficients.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        let h: Vec<f64> = basis.iter().map(|v| dot(v, w)).collect();
        for (v, &c) in basis.iter().zip(&h) {
            axpy(-c, v, w);
        }
        for (acc, c) in coeffs.iter_mut().zip(h) {
            *acc += c;
        }
    }
    coeffs
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng, basis: &[Vec<f64>]) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        orthogonalize(basis, &mut v);
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return v;
        }
    }
}

/// Combines basis vectors: `out_i = Σ_j basis_j · coeff(j, i)`.
fn combine(basis: &[Vec<f64>], coeffs: &DMatrix<f64>, columns: &[usize]) -> Vec<Vec<f64>> {
    let n = basis[0].len();
    columns
        .iter()
        .map(|&c| {
            let mut out = vec![0.0; n];
            for (j, v) in basis.iter().enumerate() {
                axpy(coeffs[(j, c)], v, &mut out);
            }
            out
        })
        .collect()
}

/// Computes the `nev` algebraically largest eigenpairs of `op`.
pub fn largest_eigenpairs<O: SymmetricOperator + ?Sized>(op: &O, cfg: &LanczosConfig) -> Result<EigenPairs> {
    let n = op.dim();
    if cfg.nev == 0 || cfg.nev > n {
        return Err(Error::InvalidConfig(format!("cannot compute {} eigenpairs of a {n}×{n} operator", cfg.nev)));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidConfig("eigensolver tolerance must be positive".into()));
    }
    let m = cfg
        .basis_size
        .unwrap_or_else(|| (2 * cfg.nev + 20).max(cfg.nev + 40))
        .clamp((cfg.nev + 1).min(n), n);
    let keep = (cfg.nev + (m - cfg.nev) / 2).min(m - 1);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut basis: Vec<Vec<f64>> = vec![random_unit(n, &mut rng, &[])];
    let mut proj = DMatrix::<f64>::zeros(m, m);
    let mut start = 0;
    let mut matvecs = 0;
    let mut w = vec![0.0; n];
    let breakdown = 1e-10;

    loop {
        let mut tail = 0.0;
        let mut residual_dir: Option<Vec<f64>> = None;
        for j in start..m {
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            let h = orthogonalize(&basis, &mut w);
            for (i, &hij) in h.iter().enumerate() {
                proj[(i, j)] = hij;
                proj[(j, i)] = hij;
            }
            let beta = norm(&w);
            if j + 1 < m {
                if beta < breakdown {
                    // Invariant subspace reached; continue with a fresh direction.
                    let fresh = random_unit(n, &mut rng, &basis);
                    basis.push(fresh);
                } else {
                    basis.push(w.iter().map(|x| x / beta).collect());
                }
            } else {
                tail = beta;
                if beta >= breakdown {
                    residual_dir = Some(w.iter().map(|x| x / beta).collect());
                }
            }
        }

        let eig = proj.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let estimates: Vec<f64> = order.iter().map(|&c| (tail * eig.eigenvectors[(m - 1, c)]).abs()).collect();
        let worst = estimates[..cfg.nev].iter().fold(0.0f64, |a, &b| a.max(b));
        let exhausted = matvecs >= cfg.max_matvecs;

        if worst <= cfg.tol || exhausted || m == n {
            let wanted = &order[..cfg.nev];
            let mut vectors = combine(&basis, &eig.eigenvectors, wanted);
            let mut values = Vec::with_capacity(cfg.nev);
            let mut residuals = Vec::with_capacity(cfg.nev);
            for v in vectors.iter_mut() {
                let nv = norm(v);
                v.iter_mut().for_each(|x| *x /= nv);
                op.apply(v, &mut w);
                matvecs += 1;
                let theta = dot(v, &w);
                axpy(-theta, v, &mut w);
                values.push(theta);
                residuals.push(norm(&w));
            }
            let worst_explicit = residuals.iter().fold(0.0f64, |a, &b| a.max(b));
            if worst_explicit <= cfg.tol {
                return Ok(EigenPairs { values, vectors, residuals, matvecs });
            }
            if exhausted || m == n {
                return Err(Error::NoConvergence { matvecs, residual: worst_explicit });
            }
        }

        // Thick restart: keep the leading Ritz vectors plus the residual direction.
        let kept = &order[..keep];
        let mut next = combine(&basis, &eig.eigenvectors, kept);
        proj.fill(0.0);
        for (i, &c) in kept.iter().enumerate() {
            proj[(i, i)] = eig.eigenvalues[c];
        }
        let dir = match residual_dir {
            Some(mut d) => {
                orthogonalize(&next, &mut d);
                let nd = norm(&d);
                if nd > 1e-8 {
                    d.iter_mut().for_each(|x| *x /= nd);
                    d
                } else {
                    random_unit(n, &mut rng, &next)
                }
            }
            None => random_unit(n, &mut rng, &next),
        };
        next.push(dir);
        basis = next;
        start = keep;
    }
}
