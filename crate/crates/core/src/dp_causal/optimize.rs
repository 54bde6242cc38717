//! Single-slot maximization of `g(T) = I(γ, T) + V(B - T)` over `0 <= T <= B`
//! for a concave continuation value `V`.
//!
//! `g` is concave, so its slope is nonincreasing and the smallest maximizer is
//! located by bisecting on the sign of the slope. The slope of `I` is
//! analytic; the slope of `V` is a second-order finite difference, which keeps
//! the location accurate well below the `sqrt(eps)` floor of a search on
//! function values alone.

use std::f64::consts::LN_2;

use crate::channel::{rate, Energy, Snr};
use crate::error::Result;
use crate::grid::UniformGrid;

/// Default tolerance on the optimal energy.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Iteration cap for the bisection.
pub const MAX_BISECTION_ITERS: usize = 200;

/// Relative step of the finite difference applied to `V`.
const DIFF_STEP: f64 = 1e-5;

/// Maximizer and maximum of a single-slot problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotChoice {
    pub energy: f64,
    pub value: f64,
}

/// Maximizes `log2(1 + γT) + value_next(B - T)` over `[0, B]`.
///
/// `value_next` must be concave on `[0, B]`; it is only evaluated there. For
/// smooth `value_next` the returned energy is within `tol` of the smallest
/// maximizer. At a kink of `value_next` the error is bounded by the
/// difference step, `1e-5 max(B, 1)`.
pub fn optimize_slot<F>(value_next: F, snr: Snr, b: Energy, tol: f64) -> (Energy, f64)
where
    F: Fn(f64) -> f64,
{
    let c = continuous_argmax(&value_next, snr.get(), b.get(), tol);
    (
        Energy::new(c.energy).expect("maximizer lies in [0, B]"),
        c.value,
    )
}

pub(crate) fn continuous_argmax<F>(value_next: &F, snr: f64, b: f64, tol: f64) -> SlotChoice
where
    F: Fn(f64) -> f64,
{
    let g = |t: f64| rate(snr, t) + value_next(b - t);
    let choice = |t: f64| SlotChoice {
        energy: t,
        value: g(t),
    };
    if b <= 0.0 {
        return choice(0.0);
    }
    let h = DIFF_STEP * b.max(1.0);
    if b < 4.0 * h {
        return tiny_battery(&g, b);
    }
    // slope of V at x, kept inside [0, b]
    let v_slope = |x: f64| {
        if x - h >= 0.0 && x + h <= b {
            (value_next(x + h) - value_next(x - h)) / (2.0 * h)
        } else if x - h < 0.0 {
            let x = x.max(0.0);
            (-3.0 * value_next(x) + 4.0 * value_next(x + h) - value_next(x + 2.0 * h)) / (2.0 * h)
        } else {
            let x = x.min(b);
            (3.0 * value_next(x) - 4.0 * value_next(x - h) + value_next(x - 2.0 * h)) / (2.0 * h)
        }
    };
    let slope = |t: f64| snr / ((1.0 + snr * t) * LN_2) - v_slope(b - t);
    if slope(0.0) <= 0.0 {
        return choice(0.0);
    }
    if slope(b) >= 0.0 {
        return choice(b);
    }
    let (mut lo, mut hi) = (0.0, b);
    for _ in 0..MAX_BISECTION_ITERS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    choice(0.5 * (lo + hi))
}

/// Batteries too small for a difference stencil: best of a fine scan.
fn tiny_battery(g: &dyn Fn(f64) -> f64, b: f64) -> SlotChoice {
    let n = 64;
    let mut best = SlotChoice {
        energy: 0.0,
        value: g(0.0),
    };
    for i in 1..=n {
        let t = b * (i as f64 / n as f64);
        let v = g(t);
        if v > best.value {
            best = SlotChoice {
                energy: t,
                value: v,
            };
        }
    }
    best
}

/// Maximizes over the discrete actions that leave a residual battery on the
/// grid, plus `T = 0` when `b` itself is off the grid.
///
/// `continuation[m]` is the continuation value at grid point `m`. Among tied
/// maxima the smallest energy wins.
pub(crate) fn lattice_argmax(
    grid: &UniformGrid,
    continuation: &[f64],
    snr: f64,
    b: f64,
) -> Result<SlotChoice> {
    let candidate: Box<dyn Fn(usize) -> (f64, f64) + '_>;
    let count;
    if let Some(jb) = grid.index_of(b) {
        let xb = grid.point(jb);
        count = jb + 1;
        candidate = Box::new(move |i| {
            let m = jb - i;
            ((xb - grid.point(m)).min(b).max(0.0), continuation[m])
        });
    } else {
        let mf = grid.floor_index(b)?;
        let at_b = grid.interp(continuation, b)?;
        count = mf + 2;
        candidate = Box::new(move |i| {
            if i == 0 {
                (0.0, at_b)
            } else {
                let m = mf - (i - 1);
                (b - grid.point(m), continuation[m])
            }
        });
    }
    let g = |i: usize| {
        let (t, v) = candidate(i);
        (t, rate(snr, t) + v)
    };
    let (mut lo, mut hi) = (0usize, count - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if g(mid + 1).1 - g(mid).1 <= 0.0 {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let (energy, value) = g(lo);
    Ok(SlotChoice { energy, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snr(v: f64) -> Snr {
        Snr::new(v).unwrap()
    }
    fn en(v: f64) -> Energy {
        Energy::new(v).unwrap()
    }

    /// Fine grid search used as a reference.
    fn grid_search(v: impl Fn(f64) -> f64, gamma: f64, b: f64, step: f64) -> f64 {
        let n = (b / step).round() as usize;
        (0..=n)
            .map(|i| i as f64 * step)
            .map(|t| (t, rate(gamma, t) + v(b - t)))
            .fold(
                (0.0, f64::NEG_INFINITY),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            )
            .0
    }

    #[test]
    fn worthless_future_spends_everything() {
        let (t, v) = optimize_slot(|_| 0.0, snr(1.0), en(2.0), DEFAULT_TOL);
        assert_eq!(t.get(), 2.0);
        assert!((v - 3f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn steep_future_spends_nothing() {
        let (t, v) = optimize_slot(|x| 10.0 * x, snr(1.0), en(2.0), DEFAULT_TOL);
        assert_eq!(t.get(), 0.0);
        assert_eq!(v, 20.0);
    }

    #[test]
    fn symmetric_split() {
        let v = |x: f64| (1.0 + x).log2();
        let (t, _) = optimize_slot(v, snr(1.0), en(2.0), DEFAULT_TOL);
        assert!((t.get() - 1.0).abs() <= DEFAULT_TOL);
        assert!((grid_search(v, 1.0, 2.0, 1e-6) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn interior_matches_grid_search() {
        for &(gamma, scale, b) in &[(3.0, 0.7, 1.3), (0.4, 2.0, 5.0), (12.0, 1.0, 0.2)] {
            let v = move |x: f64| scale * (1.0 + 2.0 * x).log2();
            let (t, _) = optimize_slot(v, snr(gamma), en(b), 1e-10);
            let reference = grid_search(v, gamma, b, 1e-6);
            assert!(
                (t.get() - reference).abs() < 2e-6,
                "{gamma}: {} vs {reference}",
                t.get()
            );
        }
    }

    #[test]
    fn zero_battery() {
        let (t, v) = optimize_slot(|x| x, snr(1.0), en(0.0), DEFAULT_TOL);
        assert_eq!(t.get(), 0.0);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn lattice_matches_enumeration() {
        let grid = UniformGrid::new(3.0, 0.01).unwrap();
        let cont: Vec<f64> = grid
            .points()
            .iter()
            .map(|x| 0.8 * (1.0 + 1.5 * x).log2())
            .collect();
        for j in [0usize, 1, 7, 100, 250, 300] {
            let b = grid.point(j);
            let c = lattice_argmax(&grid, &cont, 2.0, b).unwrap();
            let mut best = (0.0, f64::NEG_INFINITY);
            for m in (0..=j).rev() {
                let t = b - grid.point(m);
                let v = rate(2.0, t) + cont[m];
                if v > best.1 {
                    best = (t, v);
                }
            }
            assert!((c.value - best.1).abs() < 1e-12);
            assert!((c.energy - best.0).abs() < 1e-12);
        }
        // off-grid battery: energy is 0 or leaves a grid residual
        let c = lattice_argmax(&grid, &cont, 2.0, 1.234_5).unwrap();
        assert!(c.energy == 0.0 || grid.index_of(1.234_5 - c.energy).is_some());
        assert!(c.energy <= 1.234_5);
    }
}
