use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};

/// Default tolerance on the allocated sum energy.
pub const DEFAULT_EPS: f64 = 1e-9;

const MAX_ITERS: usize = 2000;

/// Output of conventional water-filling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaterFillResult {
    pub allocation: Vec<f64>,
    /// Water level `ν`; slot `k` receives `[ν - 1/γ_k]^+`.
    pub level: f64,
    /// `|Σ t - P_max|`.
    pub residual: f64,
    /// Every SNR is zero, so no allocation earns anything; the zero
    /// allocation is returned.
    pub degenerate: bool,
}

/// Water-filling over `snrs` with sum energy `p_max`.
///
/// Bisects on the water level until the allocated energy is within `eps` of
/// `p_max` without exceeding it. Zero-SNR slots never receive energy.
pub fn waterfill(snrs: &[f64], p_max: f64, eps: f64) -> Result<WaterFillResult> {
    if snrs.is_empty() {
        return validation("water-filling needs at least one slot");
    }
    if snrs.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
        return validation("SNRs must be finite and >= 0");
    }
    if !(p_max.is_finite() && p_max >= 0.0) {
        return validation(format!("sum energy must be finite and >= 0, got {p_max}"));
    }
    if !(eps > 0.0) {
        return validation(format!("tolerance must be > 0, got {eps}"));
    }
    let n = snrs.len();
    let active: Vec<(usize, f64)> = snrs
        .iter()
        .enumerate()
        .filter(|(_, g)| **g > 0.0)
        .map(|(i, g)| (i, 1.0 / g))
        .collect();

    let mut allocation = vec![0.0; n];
    if active.is_empty() {
        return Ok(WaterFillResult {
            allocation,
            level: 0.0,
            residual: p_max,
            degenerate: p_max > 0.0,
        });
    }
    if p_max == 0.0 {
        return Ok(WaterFillResult {
            allocation,
            level: 0.0,
            residual: 0.0,
            degenerate: false,
        });
    }
    if let [(i, inv)] = active[..] {
        allocation[i] = p_max;
        return Ok(WaterFillResult {
            allocation,
            level: inv + p_max,
            residual: 0.0,
            degenerate: false,
        });
    }

    let fill = |nu: f64| {
        active
            .iter()
            .map(|(_, inv)| (nu - inv).max(0.0))
            .sum::<f64>()
    };
    let max_inv = active.iter().map(|(_, inv)| *inv).fold(0.0, f64::max);
    let (mut lo, mut hi) = (0.0, max_inv + p_max);
    let mut nu = lo;
    let mut p = 0.0;
    for _ in 0..MAX_ITERS {
        if (p_max - p).abs() <= eps && p <= p_max {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // bracket exhausted at floating-point resolution
            nu = lo;
            p = fill(lo);
            break;
        }
        nu = mid;
        p = fill(nu);
        if p > p_max {
            hi = nu;
        } else {
            lo = nu;
        }
    }
    for &(i, inv) in &active {
        allocation[i] = (nu - inv).max(0.0);
    }
    Ok(WaterFillResult {
        allocation,
        level: nu,
        residual: (p_max - p).abs(),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_split() {
        let r = waterfill(&[1.0, 1.0], 2.0, DEFAULT_EPS).unwrap();
        assert!((r.allocation[0] - 1.0).abs() < 1e-9 && (r.allocation[1] - 1.0).abs() < 1e-9);
        assert!((r.level - 2.0).abs() < 1e-9);
        assert!(r.allocation.iter().sum::<f64>() <= 2.0);
    }

    #[test]
    fn unequal_snrs() {
        let r = waterfill(&[1.0, 2.0], 1.5, DEFAULT_EPS).unwrap();
        assert!((r.allocation[0] - 0.5).abs() < 1e-9);
        assert!((r.allocation[1] - 1.0).abs() < 1e-9);
        assert!((r.level - 1.5).abs() < 1e-9);
        assert!(r.residual <= DEFAULT_EPS);
    }

    #[test]
    fn single_active_slot() {
        let r = waterfill(&[1.0, 100.0], 0.5, DEFAULT_EPS).unwrap();
        assert_eq!(r.allocation[0], 0.0);
        assert!((r.allocation[1] - 0.5).abs() < 1e-9);
        assert!((r.level - 0.51).abs() < 1e-9);
    }

    #[test]
    fn zero_budget_and_zero_snr() {
        let r = waterfill(&[2.0, 4.0], 0.0, DEFAULT_EPS).unwrap();
        assert_eq!(r.allocation, vec![0.0, 0.0]);
        assert!(r.level <= 0.25);
        let r = waterfill(&[0.0, 0.0], 1.0, DEFAULT_EPS).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.allocation, vec![0.0, 0.0]);
        let r = waterfill(&[0.0, 2.0], 1.0, DEFAULT_EPS).unwrap();
        assert_eq!(r.allocation, vec![0.0, 1.0]);
        assert!(waterfill(&[], 1.0, DEFAULT_EPS).is_err());
        assert!(waterfill(&[1.0], -1.0, DEFAULT_EPS).is_err());
    }

    #[test]
    fn large_budget_stays_within_tolerance() {
        let snrs = [0.1, 0.5, 3.0, 10.0, 0.01];
        let r = waterfill(&snrs, 1234.5, DEFAULT_EPS).unwrap();
        let total: f64 = r.allocation.iter().sum();
        assert!(total <= 1234.5);
        assert!(r.residual < 1e-6, "residual {}", r.residual);
    }
}
