#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sfembed::Graph;

/// Erdős–Rényi graph on `n` vertices with edge probability `p`; isolated
/// vertices are dropped by the graph constructor, so ids are re-densified.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Option<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((i as u64, j as u64));
            }
        }
    }
    Graph::from_labeled_edges(edges).ok()
}

/// Dense adjacency matrix.
pub fn adjacency(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut a = vec![vec![0.0; n]; n];
    for (i, j) in g.edges() {
        a[i][j] = 1.0;
        a[j][i] = 1.0;
    }
    a
}

/// Hurwitz zeta `Σ_{d ≥ q} d^{−s}` by direct summation plus an
/// Euler–Maclaurin tail.
pub fn hurwitz_zeta(s: f64, q: u64) -> f64 {
    let cut = q + 10_000;
    let head: f64 = (q..cut).map(|d| (d as f64).powf(-s)).sum();
    let n = cut as f64;
    let tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0;
    head + tail
}

/// Inverse-CDF sampler of the discrete power law `P(d) ∝ d^{−α}`, `d ≥ d_min`.
pub struct DiscretePowerLaw {
    d_min: u64,
    alpha: f64,
    cdf: Vec<f64>,
}

impl DiscretePowerLaw {
    pub fn new(alpha: f64, d_min: u64) -> Self {
        let z = hurwitz_zeta(alpha, d_min);
        let mut cdf = Vec::with_capacity(200_000);
        let mut acc = 0.0;
        for d in d_min..d_min + 200_000 {
            acc += (d as f64).powf(-alpha) / z;
            cdf.push(acc);
        }
        DiscretePowerLaw { d_min, alpha, cdf }
    }

    pub fn pmf(&self, d: u64) -> f64 {
        (d as f64).powf(-self.alpha) / hurwitz_zeta(self.alpha, self.d_min)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let i = self.cdf.partition_point(|&c| c < u);
        if i < self.cdf.len() {
            return (self.d_min + i as u64) as usize;
        }
        // far tail: continuous inversion beyond the table
        let start = (self.d_min + self.cdf.len() as u64) as f64;
        let rest = (1.0 - u) / (1.0 - self.cdf[self.cdf.len() - 1]);
        (start * rest.powf(-1.0 / (self.alpha - 1.0))).floor() as usize
    }
}

pub fn pearson_def(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        None
    } else {
        Some(sxy / (sxx * syy).sqrt())
    }
}

/// Average ranks by counting: rank = #less + (#equal + 1)/2.
pub fn ranks_def(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&a| {
            let less = x.iter().filter(|&&b| b < a).count() as f64;
            let equal = x.iter().filter(|&&b| b == a).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn spearman_def(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson_def(&ranks_def(x), &ranks_def(y))
}

/// τ-b by enumerating all pairs.
pub fn kendall_def(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let (mut c, mut d, mut tx, mut ty) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = (x[i] - x[j]).signum() * (x[i] != x[j]) as i32 as f64;
            let dy = (y[i] - y[j]).signum() * (y[i] != y[j]) as i32 as f64;
            if dx == 0.0 && dy == 0.0 {
                continue;
            } else if dx == 0.0 {
                tx += 1.0;
            } else if dy == 0.0 {
                ty += 1.0;
            } else if dx == dy {
                c += 1.0;
            } else {
                d += 1.0;
            }
        }
    }
    let denom = ((c + d + tx) * (c + d + ty)).sqrt();
    if c + d + tx == 0.0 || c + d + ty == 0.0 {
        None
    } else {
        Some((c - d) / denom)
    }
}
