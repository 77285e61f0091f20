mod common;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::DiscretePowerLaw;
use sfembed::powerlaw::{fit_power_law, ks_distance};

#[test]
fn recovers_planted_exponent() {
    let law = DiscretePowerLaw::new(2.5, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let samples: Vec<usize> = (0..100_000).map(|_| law.sample(&mut rng)).collect();
    assert!(samples.iter().all(|&d| d >= 5));

    let start = Instant::now();
    let fit = fit_power_law(&samples).unwrap();
    let elapsed = start.elapsed();
    assert!((2.45..=2.55).contains(&fit.alpha), "alpha {}", fit.alpha);
    assert!(fit.ks <= 0.02, "ks {}", fit.ks);
    assert!(elapsed.as_secs_f64() <= 30.0, "took {elapsed:?}");

    let tail: Vec<usize> = samples.iter().copied().filter(|&d| d >= fit.d_min).collect();
    assert_eq!(tail.len(), fit.n_tail);
    let own = ks_distance(&tail, fit.alpha, fit.d_min as f64).unwrap();
    assert!((own - fit.ks).abs() < 1e-12);
}

#[test]
fn sampler_matches_pmf() {
    let law = DiscretePowerLaw::new(2.5, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 200_000;
    let mut counts = [0usize; 5];
    for _ in 0..n {
        let d = law.sample(&mut rng);
        if d < 10 {
            counts[d - 5] += 1;
        }
    }
    for (i, &c) in counts.iter().enumerate() {
        let p = law.pmf(5 + i as u64);
        let freq = c as f64 / n as f64;
        assert!((freq - p).abs() < 5.0 * (p * (1.0 - p) / n as f64).sqrt(), "d={} {freq} vs {p}", 5 + i);
    }
}

#[test]
fn exponent_tracks_truth_across_range() {
    for &alpha in &[2.1, 2.5, 3.0] {
        let law = DiscretePowerLaw::new(alpha, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(alpha.to_bits());
        let samples: Vec<usize> = (0..50_000).map(|_| law.sample(&mut rng)).collect();
        let fit = fit_power_law(&samples).unwrap();
        assert!((fit.alpha - alpha).abs() < 0.08, "alpha {alpha}: {}", fit.alpha);
    }
}
