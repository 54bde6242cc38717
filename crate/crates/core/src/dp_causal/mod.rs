//! Finite-horizon dynamic program for transmission with causal side
//! information.
//!
//! The state at slot `k` is `(γ_k, H_{k-1}, B_k)`. Working backwards from
//! `J_K(γ, H, B) = I(γ, B)`, each earlier slot maximizes
//! `I(γ, T) + J̄_{k+1}(γ, H, B - T)` where `J̄_{k+1}` averages the next value
//! function over the SNR and harvest transitions, applying the battery update
//! and linear interpolation along the battery axis.
//!
//! Energies are restricted to leave the residual battery on the grid, so the
//! value tables are exact for the discretized problem. Rayleigh fading is
//! integrated with a Gauss–Laguerre rule, except in the final slot where the
//! closed-form expectation is used, and decisions at a realized SNR are
//! optimized online against the stored continuation values.

mod grid;
mod optimize;

pub use grid::{Axis, StateGrid, RAYLEIGH_NODES};
pub(crate) use optimize::{continuous_argmax, lattice_argmax};
pub use optimize::{optimize_slot, SlotChoice, DEFAULT_TOL, MAX_BISECTION_ITERS};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::channel::{rate, rayleigh_rate};
use crate::error::{validation, Result};
use crate::si_models::{
    sample_scenario_from, stream_rng, BatteryModel, InitialState, StochasticModel,
};
use crate::stats::Estimate;

/// Version tag written into serialized tables.
pub const FORMAT_VERSION: u32 = 1;

/// Value functions `J_k` on the state grid, in bits.
///
/// `values[k]` holds slot `k + 1`, laid out as `[snr][harvest][battery]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueGrid {
    pub format_version: u32,
    pub grid: StateGrid,
    pub values: Vec<Vec<f64>>,
}

impl ValueGrid {
    /// `J` at slot `k` (1-based) and grid indices.
    pub fn get(&self, k: usize, si: usize, hi: usize, m: usize) -> f64 {
        self.values[k - 1][self.grid.column(k - 1, si, hi) + m]
    }

    /// Battery-axis slice at slot `k` (1-based).
    pub fn slice(&self, k: usize, si: usize, hi: usize) -> &[f64] {
        let c = self.grid.column(k - 1, si, hi);
        &self.values[k - 1][c..c + self.grid.battery.len()]
    }
}

/// Optimal transmit energies `T*_k` on the state grid, stored at the
/// transmitter as a lookup table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyTable {
    pub format_version: u32,
    pub model: StochasticModel,
    pub battery: BatteryModel,
    pub grid: StateGrid,
    /// `energy[k]` holds slot `k + 1`, laid out as `[snr][harvest][battery]`.
    pub energy: Vec<Vec<f64>>,
    /// For Rayleigh fading: `J̄_{k+1}` for slots `k = 1..K-1`, laid out as
    /// `[harvest][battery]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuation: Option<Vec<Vec<f64>>>,
}

impl PolicyTable {
    pub fn horizon(&self) -> usize {
        self.grid.horizon
    }

    /// Battery-axis slice of `T*` at slot `k` (1-based).
    pub fn slice(&self, k: usize, si: usize, hi: usize) -> &[f64] {
        let c = self.grid.column(k - 1, si, hi);
        &self.energy[k - 1][c..c + self.grid.battery.len()]
    }

    /// Transmit energy for slot `k` (1-based) in state `(γ, H_{k-1}, B)`.
    ///
    /// SNR and harvest snap to the nearest support point; off-grid battery
    /// levels interpolate the table.
    pub fn decide(&self, k: usize, snr: f64, harvest_prev: f64, b: f64) -> Result<f64> {
        let horizon = self.horizon();
        if k == 0 || k > horizon {
            return validation(format!("slot {k} outside 1..={horizon}"));
        }
        if !(b >= 0.0) {
            return validation(format!("battery level {b} must be >= 0"));
        }
        if k == horizon {
            return Ok(b);
        }
        let g = &self.grid;
        let hi = g.harvest.nearest(k - 1, harvest_prev);
        if let Some(cont) = &self.continuation {
            let n = g.battery.len();
            let row = g.harvest.row_of(hi);
            let col = &cont[k - 1][row * n..(row + 1) * n];
            return Ok(lattice_argmax(&g.battery, col, snr, b)?.energy);
        }
        let si = g.snr.nearest(k - 1, snr);
        let col = self.slice(k, si, hi);
        let t = match g.battery.index_of(b) {
            Some(j) => col[j],
            None => g.battery.interp(col, b)?,
        };
        Ok(t.clamp(0.0, b))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: PolicyTable = serde_json::from_str(text)?;
        if t.format_version != FORMAT_VERSION {
            return validation(format!(
                "policy format version {} unsupported (expected {FORMAT_VERSION})",
                t.format_version
            ));
        }
        let expected = StateGrid::new(&t.model, &t.battery, t.grid.horizon, t.grid.battery.step())?;
        if expected.snr != t.grid.snr || expected.harvest != t.grid.harvest {
            return validation("policy grid does not match its model");
        }
        if t.energy.len() != t.grid.horizon
            || (0..t.grid.horizon).any(|k| t.energy[k].len() != t.grid.states_at(k))
        {
            return validation("policy table dimensions do not match its grid");
        }
        Ok(t)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Builds the default grid and solves in one call.
pub fn solve_model(
    model: &StochasticModel,
    battery: &BatteryModel,
    horizon: usize,
    step: f64,
) -> Result<(ValueGrid, PolicyTable)> {
    let grid = StateGrid::new(model, battery, horizon, step)?;
    let (values, mut policy) = solve(model, &grid, horizon)?;
    policy.battery = battery.clone();
    Ok((values, policy))
}

/// Backward recursion over `grid` for `horizon` slots.
///
/// The returned policy carries the grid capacity with a zero initial battery;
/// [`solve_model`] fills in the full battery model.
pub fn solve(
    model: &StochasticModel,
    grid: &StateGrid,
    horizon: usize,
) -> Result<(ValueGrid, PolicyTable)> {
    if horizon == 0 {
        return validation("K must be >= 1");
    }
    if grid.horizon != horizon {
        return validation(format!(
            "grid built for K = {}, asked for K = {horizon}",
            grid.horizon
        ));
    }
    let probe = BatteryModel {
        initial: crate::si_models::InitialBattery::Fixed(0.0),
        capacity: grid.capacity,
    };
    let expected = StateGrid::new(model, &probe, horizon, grid.battery.step())?;
    if expected.snr != grid.snr || expected.harvest != grid.harvest {
        return validation("grid supports do not match the model");
    }

    let xs = grid.battery.points();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); horizon];
    let mut energy: Vec<Vec<f64>> = vec![Vec::new(); horizon];
    let rayleigh = grid.snr.rayleigh_mean.is_some();
    let mut stored = Vec::new();

    let last = horizon - 1;
    let (v, e) = last_slot(grid, &xs);
    values[last] = v;
    energy[last] = e;

    for k in (0..last).rev() {
        let cont = continuation(grid, k, &values[k + 1], &xs);
        let (v, e) = slot_tables(grid, k, &cont, &xs)?;
        values[k] = v;
        energy[k] = e;
        if rayleigh {
            stored.push(cont.into_iter().flatten().collect::<Vec<f64>>());
        }
    }
    stored.reverse();

    let value_grid = ValueGrid {
        format_version: FORMAT_VERSION,
        grid: grid.clone(),
        values,
    };
    let policy = PolicyTable {
        format_version: FORMAT_VERSION,
        model: model.clone(),
        battery: probe,
        grid: grid.clone(),
        energy,
        continuation: rayleigh.then_some(stored),
    };
    Ok((value_grid, policy))
}

fn last_slot(grid: &StateGrid, xs: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let k = grid.horizon - 1;
    let nh = grid.harvest.len_at(k);
    let mut v = Vec::with_capacity(grid.states_at(k));
    let mut e = Vec::with_capacity(grid.states_at(k));
    for &gamma in &grid.snr.points[k] {
        for _ in 0..nh {
            v.extend(xs.iter().map(|&x| rate(gamma, x)));
            e.extend_from_slice(xs);
        }
    }
    (v, e)
}

/// `J̄_{k+2}` as seen from slot `k + 1` (0-based `k`), one battery column per
/// distinct `(snr row, harvest row)` pair.
fn continuation(grid: &StateGrid, k: usize, next: &[f64], xs: &[f64]) -> Vec<Vec<f64>> {
    let n = xs.len();
    let snr_next = &grid.snr.points[k + 1];
    let h_next = &grid.harvest.points[k + 1];
    let rh = grid.harvest.rows_at(k);
    let ptrans = &grid.harvest.transitions[k];

    // Expected next value over the harvest transition, per next SNR point.
    let harvest_avg = |refilled: &dyn Fn(usize, f64) -> f64| -> Vec<Vec<f64>> {
        (0..rh)
            .map(|row| {
                let mut acc = vec![0.0; n];
                for (hj, &hv) in h_next.iter().enumerate() {
                    let p = ptrans[row][hj];
                    if p == 0.0 {
                        continue;
                    }
                    for (m, &x) in xs.iter().enumerate() {
                        acc[m] += p * refilled(hj, grid.refill(x, hv));
                    }
                }
                acc
            })
            .collect()
    };

    if let (Some(mean), true) = (grid.snr.rayleigh_mean, k + 1 == grid.horizon - 1) {
        return harvest_avg(&|_, level| rayleigh_rate(mean, level));
    }

    let per_snr: Vec<Vec<Vec<f64>>> = (0..snr_next.len())
        .into_par_iter()
        .map(|sj| {
            harvest_avg(&|hj, level| {
                let c = grid.column(k + 1, sj, hj);
                grid.battery
                    .interp(&next[c..c + n], level)
                    .expect("refilled level lies on the grid")
            })
        })
        .collect();

    let rs = grid.snr.rows_at(k);
    let strans = &grid.snr.transitions[k];
    let mut out = Vec::with_capacity(rs * rh);
    for srow in strans.iter().take(rs) {
        for hrow in 0..rh {
            let mut acc = vec![0.0; n];
            for (sj, w) in per_snr.iter().enumerate() {
                let p = srow[sj];
                if p == 0.0 {
                    continue;
                }
                for (a, v) in acc.iter_mut().zip(&w[hrow]) {
                    *a += p * v;
                }
            }
            out.push(acc);
        }
    }
    out
}

fn slot_tables(
    grid: &StateGrid,
    k: usize,
    cont: &[Vec<f64>],
    xs: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let ns = grid.snr.len_at(k);
    let nh = grid.harvest.len_at(k);
    let rh = grid.harvest.rows_at(k);
    let columns: Vec<(Vec<f64>, Vec<f64>)> = (0..ns * nh)
        .into_par_iter()
        .map(|idx| {
            let (si, hi) = (idx / nh, idx % nh);
            let gamma = grid.snr.points[k][si];
            let col = &cont[grid.snr.row_of(si) * rh + grid.harvest.row_of(hi)];
            let mut v = Vec::with_capacity(xs.len());
            let mut e = Vec::with_capacity(xs.len());
            for &x in xs {
                let c = lattice_argmax(&grid.battery, col, gamma, x)?;
                v.push(c.value);
                e.push(c.energy);
            }
            Ok((v, e))
        })
        .collect::<Result<_>>()?;
    let mut v = Vec::with_capacity(grid.states_at(k));
    let mut e = Vec::with_capacity(grid.states_at(k));
    for (cv, ce) in columns {
        v.extend(cv);
        e.extend(ce);
    }
    Ok((v, e))
}

/// Monte Carlo estimate of the expected sum throughput (bits) of `policy`
/// from the known first-slot state `s1`.
pub fn evaluate_policy_throughput(
    model: &StochasticModel,
    policy: &PolicyTable,
    s1: InitialState,
    runs: usize,
    seed: u64,
) -> Result<Estimate> {
    if runs == 0 {
        return validation("runs must be >= 1");
    }
    if *model != policy.model {
        return validation("policy was built for a different model");
    }
    let top = policy.grid.battery.top();
    if s1.battery > top + 1e-9 * top.max(1.0) {
        return Err(crate::error::Error::Extrapolation {
            level: s1.battery,
            top,
        });
    }
    let samples = (0..runs)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r as u64);
            let sc =
                sample_scenario_from(model, policy.horizon(), s1, policy.grid.capacity, &mut rng)?;
            let alloc = sc.run_causal(|k, g, h, b| policy.decide(k, g, h, b))?;
            Ok(sc.throughput(&alloc))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_samples(&samples))
}
