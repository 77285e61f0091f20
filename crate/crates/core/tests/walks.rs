mod common;

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::random_graph;
use sfembed::walker::{generate_walks, transition_distribution, PenalizedSampler, WalkConfig, WalkMode};
use sfembed::Graph;

fn star() -> Graph {
    Graph::from_edges([(0, 1), (0, 2), (0, 3)]).unwrap()
}

fn law(g: &Graph, beta: f64, v: usize) -> BTreeMap<usize, f64> {
    transition_distribution(g, beta, v).into_iter().collect()
}

#[test]
fn star_transition_law() {
    let g = star();
    let p = law(&g, 1.0, 1);
    assert!((p[&0] - 1.0 / 7.0).abs() < 1e-15);
    assert!((p[&2] - 3.0 / 7.0).abs() < 1e-15);
    assert!((p[&3] - 3.0 / 7.0).abs() < 1e-15);
    assert!(!p.contains_key(&1));

    let flat = law(&g, 0.0, 1);
    for j in [0, 2, 3] {
        assert!((flat[&j] - 1.0 / 3.0).abs() < 1e-15);
    }
}

#[test]
fn star_monte_carlo() {
    let g = star();
    let sampler = PenalizedSampler::new(&g, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 10_000;
    let mut counts = [0usize; 4];
    for _ in 0..n {
        counts[sampler.step(&g, 1, &mut rng)] += 1;
    }
    assert_eq!(counts[1], 0);
    let freq = |j: usize| counts[j] as f64 / n as f64;
    assert!((freq(0) - 1.0 / 7.0).abs() <= 0.02, "{}", freq(0));
    assert!((freq(2) - 3.0 / 7.0).abs() <= 0.02, "{}", freq(2));
    assert!((freq(3) - 3.0 / 7.0).abs() <= 0.02, "{}", freq(3));
}

#[test]
fn first_steps_of_generated_walks_follow_the_law() {
    let g = star();
    let cfg = WalkConfig { walks_per_vertex: 10_000, walk_length: 2, beta: 1.0, seed: 5, ..Default::default() };
    let corpus = generate_walks(&g, &cfg).unwrap();
    let mut counts = [0usize; 4];
    let mut total = 0;
    for w in corpus.walks.iter().filter(|w| w[0] == 1) {
        counts[w[1]] += 1;
        total += 1;
    }
    assert_eq!(total, 10_000);
    assert!((counts[0] as f64 / total as f64 - 1.0 / 7.0).abs() <= 0.02);
}

#[test]
fn sampler_converges_to_exact_law() {
    let g = random_graph(40, 0.15, 8).unwrap();
    for beta in [0.0, 0.5, 1.0, 2.0] {
        let sampler = PenalizedSampler::new(&g, beta);
        let mut rng = ChaCha8Rng::seed_from_u64(beta.to_bits());
        for v in (0..g.n()).filter(|&v| g.degree(v) > 0).take(8) {
            let exact = law(&g, beta, v);
            let n = 50_000;
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for _ in 0..n {
                *counts.entry(sampler.step(&g, v, &mut rng)).or_default() += 1;
            }
            assert!(counts.keys().all(|j| exact.contains_key(j)), "step outside support from {v}");
            let l1: f64 = exact
                .iter()
                .map(|(j, p)| (counts.get(j).copied().unwrap_or(0) as f64 / n as f64 - p).abs())
                .sum();
            assert!(l1 < 0.05, "beta {beta} vertex {v}: L1 {l1}");
        }
    }
}

#[test]
fn zero_penalty_walks_reach_two_hops_unlike_baseline() {
    let g = Graph::from_edges([(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
    let support = |mode: WalkMode| {
        let cfg = WalkConfig { walks_per_vertex: 200, walk_length: 2, beta: 0.0, seed: 1, mode, ..Default::default() };
        let corpus = generate_walks(&g, &cfg).unwrap();
        corpus.walks.iter().filter(|w| w[0] == 0).map(|w| w[1]).collect::<BTreeSet<_>>()
    };
    assert_eq!(support(WalkMode::DeepwalkBaseline), BTreeSet::from([1]));
    assert_eq!(support(WalkMode::DpWalker), BTreeSet::from([1, 2]));
}
