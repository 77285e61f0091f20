//! Preferential-attachment (Barabási–Albert) graph generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaConfig {
    /// Final vertex count.
    pub n: usize,
    /// Edges attached by every arriving vertex.
    pub m: usize,
    pub seed: u64,
}

impl PaConfig {
    /// Exact edge count: the seed clique on `m+1` vertices plus `m` per arrival.
    pub fn expected_edges(&self) -> usize {
        self.m * (self.m + 1) / 2 + self.m * (self.n - self.m - 1)
    }
}

/// Grows a graph from a clique on `m+1` vertices; each later vertex links to
/// `m` distinct existing vertices drawn with probability proportional to
/// their current degree. Vertex labels are arrival indices.
pub fn generate_pa(cfg: &PaConfig) -> Result<Graph> {
    if cfg.m == 0 || cfg.n <= cfg.m {
        return Err(Error::InvalidConfig(format!("preferential attachment needs n > m ≥ 1 (n={}, m={})", cfg.n, cfg.m)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut edges = Vec::with_capacity(cfg.expected_edges());
    // Every edge contributes both endpoints, so a uniform pick from this list
    // is a degree-proportional pick of a vertex.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * cfg.expected_edges());
    for a in 0..=cfg.m {
        for b in a + 1..=cfg.m {
            edges.push((a, b));
            endpoints.extend([a, b]);
        }
    }
    let mut targets: Vec<usize> = Vec::with_capacity(cfg.m);
    for v in cfg.m + 1..cfg.n {
        targets.clear();
        while targets.len() < cfg.m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, v));
            endpoints.extend([t, v]);
        }
    }
    Graph::from_edges(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_one_gives_tree() {
        let g = generate_pa(&PaConfig { n: 3, m: 1, seed: 5 }).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.connected_components(), 1);
    }

    #[test]
    fn exact_edge_count_and_simple() {
        let cfg = PaConfig { n: 500, m: 4, seed: 11 };
        let g = generate_pa(&cfg).unwrap();
        assert_eq!(g.n(), 500);
        assert_eq!(g.num_edges(), cfg.expected_edges());
        for v in 0..g.n() {
            assert!(g.degree(v) >= 4);
            assert!(!g.neighbors(v).contains(&v));
            assert!(g.neighbors(v).windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_pa(&PaConfig { n: 300, m: 3, seed: 9 }).unwrap();
        let b = generate_pa(&PaConfig { n: 300, m: 3, seed: 9 }).unwrap();
        let c = generate_pa(&PaConfig { n: 300, m: 3, seed: 10 }).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_invalid() {
        assert!(generate_pa(&PaConfig { n: 3, m: 3, seed: 0 }).is_err());
        assert!(generate_pa(&PaConfig { n: 3, m: 0, seed: 0 }).is_err());
    }
}
