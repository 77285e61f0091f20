mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use sfembed::proximity::{common_neighbor_matrix, penalized_weight_matrix, proximity_matrix};
use sfembed::reconstruct::{reconstruct, reconstruct_edges, sweep_epsilon, EpsilonGrid};
use sfembed::stats::{kendall_tau_b, pearson, spearman};
use sfembed::bounds::sphere_bounds;
use sfembed::powerlaw::{fit_power_law, fitted_cdf};
use sfembed::walker::{transition_distribution, HuffmanTree};
use sfembed::Embedding;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = sfembed::Graph> {
    (3..=max_n, 0.05f64..0.6, any::<u64>()).prop_filter_map("graph has edges", |(n, p, seed)| random_graph(n, p, seed))
}

fn brute_force_degrees(rows: &[Vec<f64>], eps: f64) -> Vec<usize> {
    let n = rows.len();
    let mut deg = vec![0; n];
    for i in 0..n {
        for j in i + 1..n {
            let d: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if 1.0 / (1.0 + d.exp()) >= eps {
                deg[i] += 1;
                deg[j] += 1;
            }
        }
    }
    deg
}

fn random_rows(n: usize, k: usize, scale: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..k).map(|_| rng.gen_range(-scale..scale)).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn common_neighbors_match_triple_loop(g in graph_strategy(50)) {
        let a = adjacency(&g);
        let n = g.n();
        let c = common_neighbor_matrix(&g);
        let cp = proximity_matrix(&g);
        for i in 0..n {
            for j in 0..n {
                let mut want = 0.0;
                if i != j {
                    for l in 0..n {
                        want += a[l][i] * a[l][j];
                    }
                }
                prop_assert_eq!(c.get(i, j), want);
                prop_assert_eq!(cp.get(i, j), want + a[i][j]);
            }
        }
    }

    #[test]
    fn penalized_weights_match_definition(g in graph_strategy(40), beta in 0.0f64..3.0) {
        let a = adjacency(&g);
        let w = penalized_weight_matrix(&g, beta);
        let d = g.degrees();
        prop_assert!(w.is_symmetric(1e-12));
        for i in 0..g.n() {
            for j in 0..g.n() {
                let c: f64 = if i == j { 0.0 } else { (0..g.n()).map(|l| a[l][i] * a[l][j]).sum() };
                let want = (c + a[i][j]) / ((d[i] * d[j]) as f64).powf(beta);
                prop_assert!((w.get(i, j) - want).abs() <= 1e-12 * want.max(1.0));
            }
        }
    }

    #[test]
    fn transition_laws_sum_to_one(g in graph_strategy(100), beta in 0.0f64..3.0) {
        for v in 0..g.n() {
            let p = transition_distribution(&g, beta, v);
            let total: f64 = p.iter().map(|x| x.1).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|&(j, w)| j != v && w > 0.0));
        }
    }

    #[test]
    fn correlations_match_definitions(
        pairs in prop::collection::vec((0u8..12, 0u8..12), 2..100),
    ) {
        let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
        let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => (a - b).abs() <= 1e-9,
            (None, None) => true,
            _ => false,
        };
        prop_assert!(close(pearson(&x, &y), pearson_def(&x, &y)));
        prop_assert!(close(spearman(&x, &y), spearman_def(&x, &y)));
        prop_assert!(close(kendall_tau_b(&x, &y), kendall_def(&x, &y)));
    }

    #[test]
    fn continuous_correlations_match_definitions(x in prop::collection::vec(-1e3f64..1e3, 2..100), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<f64> = x.iter().map(|v| v * rng.gen_range(-1.0..2.0) + rng.gen_range(-5.0..5.0)).collect();
        let ok = |a: Option<f64>, b: Option<f64>| a.zip(b).is_none_or(|(a, b)| (a - b).abs() <= 1e-9) && a.is_some() == b.is_some();
        prop_assert!(ok(pearson(&x, &y), pearson_def(&x, &y)));
        prop_assert!(ok(spearman(&x, &y), spearman_def(&x, &y)));
        prop_assert!(ok(kendall_tau_b(&x, &y), kendall_def(&x, &y)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn reconstruction_matches_brute_force(n in 2usize..500, k in 1usize..6, scale in 0.1f64..3.0, seed in any::<u64>()) {
        let rows = random_rows(n, k, scale, seed);
        let emb = Embedding::from_rows(rows.clone()).unwrap();
        for eps in [0.05, 0.2, 0.3, 0.45, 0.5, 0.7] {
            prop_assert_eq!(reconstruct(&emb, eps).unwrap(), brute_force_degrees(&rows, eps));
        }
        let edges = reconstruct_edges(&emb, 0.3).unwrap();
        let deg = reconstruct(&emb, 0.3).unwrap();
        prop_assert_eq!(edges.len() * 2, deg.iter().sum::<usize>());
    }

    #[test]
    fn sweep_rows_match_brute_force(n in 10usize..120, seed in any::<u64>()) {
        let rows = random_rows(n, 3, 1.5, seed);
        let emb = Embedding::from_rows(rows.clone()).unwrap();
        let original: Vec<usize> = (0..n).map(|i| 1 + (i * 7 + seed as usize % 5) % 13).collect();
        let grid = EpsilonGrid { start: 0.05, end: 0.5, step: 0.05 };
        let sweep = sweep_epsilon(&emb, &original, &grid).unwrap();
        for row in &sweep.table {
            let want = brute_force_degrees(&rows, row.epsilon);
            prop_assert_eq!(&row.reconstructed_degrees, &want);
            let x: Vec<f64> = original.iter().map(|&d| d as f64).collect();
            let y: Vec<f64> = want.iter().map(|&d| d as f64).collect();
            match (row.correlations, pearson_def(&x, &y)) {
                (Some(c), Some(p)) => prop_assert!((c.pearson - p).abs() < 1e-9),
                (None, None) => {}
                (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn edge_list_round_trip(g in graph_strategy(60)) {
        let mut buf = Vec::new();
        sfembed::graph::write_edge_list(&g, &mut buf).unwrap();
        let back = sfembed::graph::load_edge_list(buf.as_slice()).unwrap();
        prop_assert_eq!(back.labels(), g.labels());
        prop_assert_eq!(back.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());
    }

    #[test]
    fn embedding_round_trip(
        rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 1..40),
        offset in 0u64..1000,
    ) {
        let emb = Embedding::from_rows(rows).unwrap();
        let labels: Vec<u64> = (0..emb.n() as u64).map(|i| offset + 3 * i).collect();
        let mut buf = Vec::new();
        sfembed::embedding::write_embedding(&emb, &labels, &mut buf).unwrap();
        let (l, back) = sfembed::embedding::read_embedding(buf.as_slice()).unwrap();
        prop_assert_eq!(l, labels);
        prop_assert_eq!(back.as_slice(), emb.as_slice());
    }

    #[test]
    fn sweep_table_round_trip(n in 5usize..60, seed in any::<u64>()) {
        let emb = Embedding::from_rows(random_rows(n, 2, 2.0, seed)).unwrap();
        let original: Vec<usize> = (0..n).map(|i| 1 + i % 4).collect();
        let grid = EpsilonGrid { start: 0.05, end: 0.5, step: 0.05 };
        let sweep = sweep_epsilon(&emb, &original, &grid).unwrap();
        let mut buf = Vec::new();
        sweep.write_table(&mut buf).unwrap();
        let rows = sfembed::reconstruct::read_sweep_table(buf.as_slice()).unwrap();
        prop_assert_eq!(rows.len(), sweep.table.len());
        for (r, t) in rows.iter().zip(&sweep.table) {
            prop_assert_eq!(r.epsilon, t.epsilon);
            prop_assert_eq!(r.edge_count, t.edge_count);
            prop_assert_eq!(r.correlations, t.correlations);
        }
    }

    #[test]
    fn duplicated_degrees_fit_identically(seed in any::<u64>(), n in 200usize..2000) {
        let law = DiscretePowerLaw::new(2.5, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let degrees: Vec<usize> = (0..n).map(|_| law.sample(&mut rng)).collect();
        let doubled: Vec<usize> = degrees.iter().flat_map(|&d| [d, d]).collect();
        let (a, b) = (fit_power_law(&degrees), fit_power_law(&doubled));
        prop_assert_eq!(a.is_ok(), b.is_ok());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(a.d_min, b.d_min);
            prop_assert!((a.alpha - b.alpha).abs() < 1e-9);
            prop_assert!((a.ks - b.ks).abs() < 1e-9);
            prop_assert_eq!(a.n_tail * 2, b.n_tail);
        }
    }

    #[test]
    fn fitted_cdf_is_a_distribution(alpha in 1.2f64..4.0, d_min in 1usize..50) {
        let f = |d: usize| fitted_cdf(d as f64, alpha, d_min as f64);
        prop_assert!(f(d_min) > 0.0);
        let mut prev = 0.0;
        for d in d_min..d_min + 200 {
            prop_assert!(f(d) >= prev && f(d) <= 1.0);
            prev = f(d);
        }
    }

    #[test]
    fn bound_slopes(k in 1usize..2000) {
        let b = sphere_bounds(k).unwrap();
        let kf = k as f64;
        prop_assert!((b.lower_density.log2 + kf).abs() < 1e-9);
        prop_assert!((b.upper_density.log2 + 0.599 * kf).abs() < 1e-9 * kf);
        if k > 40 {
            prop_assert!((b.lower.log2 / kf - 1.5f64.log2()).abs() < 1e-12);
            prop_assert!((b.upper.log2 / kf - (3f64.log2() - 0.599)).abs() < 1e-12);
        } else {
            let lower = b.lower.exact.unwrap();
            prop_assert_eq!(lower, 3u128.pow(k as u32) / 2u128.pow(k as u32));
            prop_assert!(b.upper.exact.unwrap() >= lower);
        }
        prop_assert_eq!(b.upper_valid, k >= 115);
    }

    #[test]
    fn huffman_partition_of_unity(freq in prop::collection::vec(1u64..1000, 2..40), seed in any::<u64>()) {
        let tree = HuffmanTree::new(&freq);
        let k = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let theta: Vec<f64> = (0..tree.internal_nodes() * k).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let total: f64 = (0..tree.leaves()).map(|l| tree.leaf_probability(l, &u, &theta)).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }
}
