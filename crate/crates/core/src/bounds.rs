//! Sphere-packing bounds on how many mutually ε-separated points fit in an
//! ε-ball of `R^k`.
//!
//! With `Δ_k` the optimal packing density, the count is `⌊3^k Δ_k⌋`, and
//! `2^{−k} ≤ Δ_k ≤ 2^{−0.599k}` (the upper bound only for large `k`) gives
//! `⌊(3/2)^k⌋ ≤ M_k ≤ ⌊3^k 2^{−0.599k}⌋`. Everything is carried in log₂ space;
//! exact integers are only produced while they fit comfortably.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent of the asymptotic upper bound on packing density.
pub const UPPER_DENSITY_EXPONENT: f64 = 0.599;
/// Dimension from which the density upper bound is the best known.
pub const UPPER_BOUND_REGIME: usize = 115;
/// Largest `k` for which integers are reported exactly.
pub const EXACT_UP_TO: usize = 40;

/// A positive quantity kept as its base-2 logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub log2: f64,
    /// The exact integer value when `k ≤ 40`.
    pub exact: Option<u128>,
}

impl BoundValue {
    fn from_log2(log2: f64) -> Self {
        BoundValue { log2, exact: None }
    }

    fn exact(v: u128) -> Self {
        BoundValue { log2: (v as f64).log2(), exact: Some(v) }
    }

    /// Decimal scientific form `(mantissa, exponent)` with `1 ≤ mantissa < 10`.
    pub fn scientific(&self) -> (f64, i64) {
        let log10 = self.log2 * std::f64::consts::LOG10_2;
        let exponent = log10.floor();
        (10f64.powf(log10 - exponent), exponent as i64)
    }

    /// The value as a float; infinite when it overflows `f64`.
    pub fn approx(&self) -> f64 {
        match self.exact {
            Some(v) => v as f64,
            None => self.log2.exp2(),
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exact {
            Some(v) => write!(f, "{v}"),
            None => {
                let (m, e) = self.scientific();
                write!(f, "{m:.6}e{e}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub k: usize,
    /// `⌊(3/2)^k⌋`
    pub lower: BoundValue,
    /// `⌊3^k·2^{−0.599k}⌋`
    pub upper: BoundValue,
    /// `2^{−k}`
    pub lower_density: BoundValue,
    /// `2^{−0.599k}`
    pub upper_density: BoundValue,
    /// Whether `k` lies in the regime where the upper bound is established.
    pub upper_valid: bool,
}

pub fn sphere_bounds(k: usize) -> Result<BoundReport> {
    if k == 0 {
        return Err(Error::InvalidConfig("dimension must be at least 1".into()));
    }
    let kf = k as f64;
    let upper_log2 = kf * (3f64.log2() - UPPER_DENSITY_EXPONENT);
    let (lower, upper) = if k <= EXACT_UP_TO {
        let three = 3u128.pow(k as u32);
        let two = 2u128.pow(k as u32);
        (BoundValue::exact(three / two), BoundValue::exact(upper_log2.exp2().floor() as u128))
    } else {
        (BoundValue::from_log2(kf * 1.5f64.log2()), BoundValue::from_log2(upper_log2))
    };
    Ok(BoundReport {
        k,
        lower,
        upper,
        lower_density: BoundValue::from_log2(-kf),
        upper_density: BoundValue::from_log2(-UPPER_DENSITY_EXPONENT * kf),
        upper_valid: k >= UPPER_BOUND_REGIME,
    })
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "k: {}", self.k)?;
        writeln!(f, "lower: {}", self.lower)?;
        writeln!(f, "upper: {}", self.upper)?;
        writeln!(f, "lower_density: {}", self.lower_density)?;
        writeln!(f, "upper_density: {}", self.upper_density)?;
        write!(f, "upper_valid: {}", self.upper_valid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_dimensions() {
        assert_eq!(sphere_bounds(1).unwrap().lower.exact, Some(1));
        assert_eq!(sphere_bounds(2).unwrap().lower.exact, Some(2));
        assert_eq!(sphere_bounds(3).unwrap().lower.exact, Some(3));
        // 3·2^{-0.599} = 1.9808...
        assert_eq!(sphere_bounds(1).unwrap().upper.exact, Some(1));
        assert!(sphere_bounds(0).is_err());
    }

    #[test]
    fn lower_strictly_increasing() {
        let mut last = 0.0;
        for k in 2..400 {
            let b = sphere_bounds(k).unwrap();
            assert!(b.lower.log2 > last);
            assert!(b.lower.log2 <= b.upper.log2);
            last = b.lower.log2;
        }
    }

    #[test]
    fn k100_scientific() {
        let b = sphere_bounds(100).unwrap();
        let (m, e) = b.lower.scientific();
        assert_eq!(e, 17);
        assert!((m - 4.0656).abs() < 1e-3);
        assert!(!b.upper_valid);
        assert!(sphere_bounds(115).unwrap().upper_valid);
    }

    #[test]
    fn exact_matches_log_form_at_boundary() {
        let b = sphere_bounds(EXACT_UP_TO).unwrap();
        let approx = (EXACT_UP_TO as f64 * 1.5f64.log2()).exp2();
        assert!((b.lower.approx() - approx).abs() <= 1.0);
    }
}
