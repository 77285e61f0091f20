//! Power-law fitting of degree sequences with Kolmogorov–Smirnov selection
//! of the lower cutoff.
//!
//! Degrees are discrete; the exponent uses the continuous MLE with the usual
//! half-unit offset, `α̂ = 1 + n / Σ ln(d_i / (d_min − ½))`, and the fitted
//! CDF is the matching continuous approximation
//! `F(d) = 1 − ((d + ½) / (d_min − ½))^{1−α}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of samples in a fitted tail.
pub const MIN_TAIL: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub d_min: usize,
    pub ks: f64,
    pub n_tail: usize,
    /// `C` of the density `C·d^{−α}`, continuous form `(α−1)·d_min^{α−1}`.
    pub norm_const: f64,
}

/// Fitted CDF at integer `d ≥ d_min`.
pub fn fitted_cdf(d: f64, alpha: f64, d_min: f64) -> f64 {
    1.0 - ((d + 0.5) / (d_min - 0.5)).powf(1.0 - alpha)
}

/// Exponent MLE for a tail whose every value is `≥ d_min`.
pub fn estimate_alpha(tail: &[usize], d_min: usize) -> f64 {
    let base = d_min as f64 - 0.5;
    let log_sum: f64 = tail.iter().map(|&d| (d as f64 / base).ln()).sum();
    1.0 + tail.len() as f64 / log_sum
}

fn ks_sorted(sorted: &[usize], alpha: f64, d_min: f64) -> f64 {
    let n = sorted.len() as f64;
    let mut worst = 0.0f64;
    let mut i = 0;
    while i < sorted.len() {
        let d = sorted[i];
        while i < sorted.len() && sorted[i] == d {
            i += 1;
        }
        let empirical = i as f64 / n;
        worst = worst.max((empirical - fitted_cdf(d as f64, alpha, d_min)).abs());
    }
    worst
}

/// Supremum over the sample points of `|F_empirical − F_fitted|`.
pub fn ks_distance(samples: &[usize], alpha: f64, d_min: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("empty tail".into()));
    }
    if !(alpha > 1.0) || !(d_min >= 1.0) {
        return Err(Error::InvalidConfig(format!("need alpha > 1 and d_min ≥ 1 (alpha={alpha}, d_min={d_min})")));
    }
    if samples.iter().any(|&d| (d as f64) < d_min) {
        return Err(Error::InvalidConfig("tail contains samples below d_min".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    Ok(ks_sorted(&sorted, alpha, d_min))
}

/// Fits a power law, scanning every distinct degree up to the 90th
/// percentile as the cutoff and keeping the one with the smallest K-S
/// distance (smallest cutoff on ties).
pub fn fit_power_law(degrees: &[usize]) -> Result<PowerLawFit> {
    if degrees.len() < MIN_TAIL {
        return Err(Error::InsufficientData(format!("need at least {MIN_TAIL} samples, got {}", degrees.len())));
    }
    if degrees.contains(&0) {
        return Err(Error::InvalidConfig("degrees must be positive".into()));
    }
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let p90 = sorted[((sorted.len() as f64 * 0.9).ceil() as usize).saturating_sub(1)];

    let mut best: Option<PowerLawFit> = None;
    let mut start = 0;
    while start < sorted.len() {
        let d_min = sorted[start];
        if d_min > p90 {
            break;
        }
        let tail = &sorted[start..];
        let varied = tail[tail.len() - 1] != d_min;
        if tail.len() >= MIN_TAIL && varied {
            let alpha = estimate_alpha(tail, d_min);
            let ks = ks_sorted(tail, alpha, d_min as f64);
            if best.is_none_or(|b| ks < b.ks) {
                best = Some(PowerLawFit {
                    alpha,
                    d_min,
                    ks,
                    n_tail: tail.len(),
                    norm_const: (alpha - 1.0) * (d_min as f64).powf(alpha - 1.0),
                });
            }
        }
        while start < sorted.len() && sorted[start] == d_min {
            start += 1;
        }
    }
    best.ok_or_else(|| Error::Unfittable(format!("no cutoff leaves {MIN_TAIL} varied samples in the tail")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_equal_is_unfittable() {
        assert!(matches!(fit_power_law(&[7; 50]), Err(Error::Unfittable(_))));
    }

    #[test]
    fn too_few_samples() {
        assert!(fit_power_law(&[1, 2, 3]).is_err());
        assert!(fit_power_law(&[0, 1, 2, 3, 4, 5, 6, 7, 8, 9]).is_err());
    }

    #[test]
    fn single_point_tail() {
        let alpha = 2.5;
        let ks = ks_distance(&[4], alpha, 4.0).unwrap();
        let gap = (4.5f64 / 3.5).powf(1.0 - alpha);
        assert!((ks - gap).abs() < 1e-15);
        assert!(ks_distance(&[], 2.0, 1.0).is_err());
        assert!(ks_distance(&[3], 2.0, 4.0).is_err());
    }

    #[test]
    fn duplicating_sample_keeps_fit() {
        let base: Vec<usize> = (1..200).map(|i| 1 + (1000 / i) % 97).collect();
        let doubled: Vec<usize> = base.iter().chain(base.iter()).copied().collect();
        let a = fit_power_law(&base).unwrap();
        let b = fit_power_law(&doubled).unwrap();
        assert_eq!(a.d_min, b.d_min);
        assert!((a.alpha - b.alpha).abs() < 1e-12);
        assert!((a.ks - b.ks).abs() < 1e-12);
    }

    #[test]
    fn selected_cutoff_minimizes_ks() {
        let sample: Vec<usize> = (1..500).map(|i| ((10_000.0 / i as f64).powf(0.7)) as usize + 1).collect();
        let fit = fit_power_law(&sample).unwrap();
        assert!(fit.alpha > 1.0 && fit.norm_const > 0.0);
        assert!((0.0..=1.0).contains(&fit.ks));
        let mut cutoffs = sample.clone();
        cutoffs.sort_unstable();
        let p90 = cutoffs[(cutoffs.len() as f64 * 0.9).ceil() as usize - 1];
        cutoffs.dedup();
        for d in cutoffs.into_iter().filter(|&d| d <= p90) {
            let tail: Vec<usize> = sample.iter().copied().filter(|&x| x >= d).collect();
            if tail.len() < MIN_TAIL || tail.iter().all(|&x| x == d) {
                continue;
            }
            let a = estimate_alpha(&tail, d);
            assert!(ks_distance(&tail, a, d as f64).unwrap() >= fit.ks - 1e-12);
        }
    }
}
