//! Brute-force references for the solvers, kept deliberately simple.
//!
//! [`brute_force_fullsi`] searches every allocation on an energy lattice;
//! [`brute_force_causal`] evaluates every grid-feasible energy in every
//! state against explicit sums over the transition kernels.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::channel::{rate, rayleigh_rate};
use crate::dp_causal::{StateGrid, ValueGrid, FORMAT_VERSION};
use crate::error::{validation, Error, Result};
use crate::si_models::{battery_step, Scenario, StochasticModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSearchConfig {
    /// Lattice spacing of the energies.
    pub t_step: f64,
    /// Largest number of objective evaluations the search may perform.
    pub max_states: f64,
}

impl Default for GridSearchConfig {
    fn default() -> Self {
        GridSearchConfig {
            t_step: 1e-3,
            max_states: 1e10,
        }
    }
}

impl GridSearchConfig {
    /// Largest slope of the objective in any one energy: `max γ / ln 2`.
    pub fn slope_bound(sc: &Scenario) -> f64 {
        sc.snr.iter().copied().fold(0.0, f64::max) / LN_2
    }

    /// Declared optimality gap of the lattice search, `L t_step`.
    pub fn error_bound(&self, sc: &Scenario) -> f64 {
        Self::slope_bound(sc) * self.t_step
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_step > 0.0 && self.t_step.is_finite()) {
            return validation(format!("t_step must be > 0, got {}", self.t_step));
        }
        Ok(())
    }
}

/// Best allocation over the energy lattice, with its throughput in bits.
///
/// With an unbounded battery the cumulative spending through each slot
/// before the last ranges over every lattice point allowed by the
/// cumulative energy constraint, and the last slot spends the remainder. The
/// search is exhaustive; memoizing on the cumulative spending makes its cost
/// `K N^2` evaluations for `N` lattice points. With a finite battery every
/// lattice energy (plus the full battery) is enumerated in every slot.
pub fn brute_force_fullsi(sc: &Scenario, cfg: &GridSearchConfig) -> Result<(Vec<f64>, f64)> {
    sc.validate()?;
    cfg.validate()?;
    if sc.horizon == 1 {
        let alloc = vec![sc.initial_battery];
        let bits = sc.throughput(&alloc);
        return Ok((alloc, bits));
    }
    let (alloc, bits) = if sc.capacity.is_infinite() {
        cumulative_search(sc, cfg)?
    } else {
        bounded_search(sc, cfg)?
    };
    sc.replay(&alloc)?;
    Ok((alloc, bits))
}

fn cumulative_search(sc: &Scenario, cfg: &GridSearchConfig) -> Result<(Vec<f64>, f64)> {
    let k = sc.horizon;
    let ts = cfg.t_step;
    // available[j]: B_1 + H_1 + … + H_j (0-based slot j)
    let mut available = vec![sc.initial_battery; k];
    for j in 1..k {
        available[j] = available[j - 1] + sc.harvest[j - 1];
    }
    // largest lattice index whose cumulative spending fits in slot j
    let top: Vec<usize> = available
        .iter()
        .map(|&a| {
            let mut n = (a / ts).floor() as usize;
            while n > 0 && n as f64 * ts > a {
                n -= 1;
            }
            n
        })
        .collect();
    let needed: f64 = (0..k - 1).map(|j| (top[j] as f64 + 1.0).powi(2)).sum();
    if needed > cfg.max_states {
        return Err(Error::Refused {
            needed,
            cap: cfg.max_states,
        });
    }

    // value[s]: best throughput of slots j.. given cumulative spending s before slot j
    let last = k - 1;
    let mut value: Vec<f64> = (0..=top[last - 1])
        .map(|s| rate(sc.snr[last], (available[last] - s as f64 * ts).max(0.0)))
        .collect();
    let mut choice: Vec<Vec<usize>> = vec![Vec::new(); last];
    for j in (0..last).rev() {
        let rates: Vec<f64> = (0..=top[j])
            .map(|d| rate(sc.snr[j], d as f64 * ts))
            .collect();
        let from = if j == 0 { 0 } else { top[j - 1] };
        let (v, c): (Vec<f64>, Vec<usize>) = (0..=from)
            .into_par_iter()
            .map(|s| {
                let mut best = (f64::NEG_INFINITY, s);
                for s2 in s..=top[j] {
                    let v = rates[s2 - s] + value[s2];
                    if v > best.0 {
                        best = (v, s2);
                    }
                }
                best
            })
            .unzip();
        value = v;
        choice[j] = c;
    }

    let mut alloc = Vec::with_capacity(k);
    let mut s = 0usize;
    for c in &choice {
        let s2 = c[s];
        alloc.push((s2 - s) as f64 * ts);
        s = s2;
    }
    let spent: f64 = alloc.iter().sum();
    alloc.push((available[last] - spent).max(0.0));
    let bits = sc.throughput(&alloc);
    Ok((alloc, bits))
}

fn bounded_search(sc: &Scenario, cfg: &GridSearchConfig) -> Result<(Vec<f64>, f64)> {
    let k = sc.horizon;
    let ts = cfg.t_step;
    let per_slot = (sc.capacity.value() / ts).floor() + 2.0;
    let needed = per_slot.powi(k as i32 - 1);
    if needed > cfg.max_states {
        return Err(Error::Refused {
            needed,
            cap: cfg.max_states,
        });
    }

    fn go(sc: &Scenario, ts: f64, j: usize, b: f64, path: &mut Vec<f64>) -> (f64, Vec<f64>) {
        let k = sc.horizon;
        if j == k - 1 {
            path.push(b);
            let out = (rate(sc.snr[j], b), path.clone());
            path.pop();
            return out;
        }
        let n = (b / ts).floor() as usize;
        let candidates = (0..=n)
            .map(|i| i as f64 * ts)
            .filter(|t| *t <= b)
            .chain(std::iter::once(b));
        let mut best = (f64::NEG_INFINITY, Vec::new());
        for t in candidates {
            let next =
                battery_step(b, t, sc.harvest[j], sc.capacity).expect("candidate within battery");
            path.push(t);
            let (v, p) = go(sc, ts, j + 1, next, path);
            path.pop();
            let v = v + rate(sc.snr[j], t);
            if v > best.0 {
                best = (v, p);
            }
        }
        best
    }

    let (_, alloc) = go(sc, ts, 0, sc.initial_battery, &mut Vec::with_capacity(k));
    let bits = sc.throughput(&alloc);
    Ok((alloc, bits))
}

/// Value functions of the causal problem by exhaustive backward enumeration
/// on `grid`: every energy leaving the residual battery on a grid point and
/// every kernel transition are evaluated explicitly.
pub fn brute_force_causal(
    model: &StochasticModel,
    grid: &StateGrid,
    horizon: usize,
    max_states: usize,
) -> Result<ValueGrid> {
    if horizon == 0 || grid.horizon != horizon {
        return validation("grid horizon must equal K >= 1");
    }
    model.validate()?;
    let per_slot = (0..horizon).map(|k| grid.states_at(k)).max().unwrap_or(0);
    if per_slot > max_states {
        return Err(Error::Refused {
            needed: per_slot as f64,
            cap: max_states as f64,
        });
    }

    let n = grid.battery.len();
    let top = grid.battery.top();
    let xs: Vec<f64> = (0..n).map(|j| grid.battery.point(j)).collect();
    let clip = |x: f64| x.min(grid.capacity.value()).min(top);
    // linear interpolation written out independently of the solver's grid helper
    let lookup = |col: &[f64], x: f64| -> f64 {
        let pos = (x / top * (n - 1) as f64).clamp(0.0, (n - 1) as f64);
        let i = (pos.floor() as usize).min(n - 2);
        let f = pos - i as f64;
        if f == 0.0 {
            col[i]
        } else if f == 1.0 {
            col[i + 1]
        } else {
            col[i] + (col[i + 1] - col[i]) * f
        }
    };

    let mut values: Vec<Vec<f64>> = vec![Vec::new(); horizon];
    for k in (0..horizon).rev() {
        let ns = grid.snr.len_at(k);
        let nh = grid.harvest.len_at(k);
        let mut table = vec![0.0; ns * nh * n];
        if k == horizon - 1 {
            for si in 0..ns {
                for hi in 0..nh {
                    for m in 0..n {
                        table[(si * nh + hi) * n + m] = rate(grid.snr.points[k][si], xs[m]);
                    }
                }
            }
            values[k] = table;
            continue;
        }
        let next = &values[k + 1];
        let ns2 = grid.snr.len_at(k + 1);
        let nh2 = grid.harvest.len_at(k + 1);
        let final_rayleigh = grid.snr.rayleigh_mean.filter(|_| k + 1 == horizon - 1);
        let expect = |si: usize, hi: usize, residual: f64| -> f64 {
            let mut total = 0.0;
            for h2 in 0..nh2 {
                let ph = grid.harvest.transitions[k][hi][h2];
                let level = clip(residual + grid.harvest.points[k + 1][h2]);
                if let Some(mean) = final_rayleigh {
                    total += ph * rayleigh_rate(mean, level);
                    continue;
                }
                for s2 in 0..ns2 {
                    let ps = grid.snr.transitions[k][si][s2];
                    let col = &next[(s2 * nh2 + h2) * n..(s2 * nh2 + h2 + 1) * n];
                    total += ps * ph * lookup(col, level);
                }
            }
            total
        };
        table.par_iter_mut().enumerate().for_each(|(idx, out)| {
            let (si, rest) = (idx / (nh * n), idx % (nh * n));
            let (hi, m) = (rest / n, rest % n);
            let gamma = grid.snr.points[k][si];
            let mut best = f64::NEG_INFINITY;
            for j in 0..=m {
                let t = xs[m] - xs[j];
                let v = rate(gamma, t) + expect(si, hi, xs[j]);
                if v > best {
                    best = v;
                }
            }
            *out = best;
        });
        values[k] = table;
    }
    Ok(ValueGrid {
        format_version: FORMAT_VERSION,
        grid: grid.clone(),
        values,
    })
}
