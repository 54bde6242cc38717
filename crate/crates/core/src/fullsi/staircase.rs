use serde::{Deserialize, Serialize};
use std::path::Path;

use super::waterfill::{waterfill, WaterFillResult};
use crate::error::{validation, Result};
use crate::si_models::Scenario;

/// Optimal full-SI allocation with an unbounded battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseResult {
    /// Slots (1-based) at which the battery is emptied; the last is `K`.
    pub transition_slots: Vec<usize>,
    /// Water level of every slot; constant within each interval.
    pub water_levels: Vec<f64>,
    pub allocation: Vec<f64>,
    pub throughput_bits: f64,
}

impl StaircaseResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Energy available to the interval `start..=end` (0-based slots): the
/// harvests `H_start … H_end` with `H_0 = B_1`.
fn interval_budget(sc: &Scenario, start: usize, end: usize) -> f64 {
    (start..=end)
        .map(|j| {
            if j == 0 {
                sc.initial_battery
            } else {
                sc.harvest[j - 1]
            }
        })
        .sum()
}

/// Water-fills `start..=end` and checks every cumulative constraint inside
/// the interval to within `eps`.
fn try_interval(
    sc: &Scenario,
    start: usize,
    end: usize,
    eps: f64,
) -> Result<Option<WaterFillResult>> {
    let budget = interval_budget(sc, start, end);
    let wf = waterfill(&sc.snr[start..=end], budget, eps)?;
    let mut spent = 0.0;
    let mut avail = 0.0;
    for (off, t) in wf.allocation.iter().enumerate() {
        let j = start + off;
        spent += t;
        avail += if j == 0 {
            sc.initial_battery
        } else {
            sc.harvest[j - 1]
        };
        if spent > avail + eps {
            return Ok(None);
        }
    }
    Ok(Some(wf))
}

struct Builder<'a> {
    sc: &'a Scenario,
    slots: Vec<usize>,
    levels: Vec<f64>,
    allocation: Vec<f64>,
}

impl<'a> Builder<'a> {
    fn new(sc: &'a Scenario) -> Self {
        Builder {
            sc,
            slots: Vec::new(),
            levels: Vec::new(),
            allocation: Vec::new(),
        }
    }

    fn next_start(&self) -> usize {
        self.slots.last().copied().unwrap_or(0)
    }

    fn push(&mut self, end: usize, wf: WaterFillResult) {
        let start = self.next_start();
        let level = if wf.degenerate {
            // every allocation of the interval is optimal; keep the staircase flat
            self.levels.last().copied().unwrap_or(0.0)
        } else {
            wf.level
        };
        self.levels
            .extend(std::iter::repeat_n(level, end + 1 - start));
        self.allocation.extend(wf.allocation);
        self.slots.push(end + 1);
    }

    fn finish(self) -> StaircaseResult {
        let throughput_bits = self.sc.throughput(&self.allocation);
        StaircaseResult {
            transition_slots: self.slots,
            water_levels: self.levels,
            allocation: self.allocation,
            throughput_bits,
        }
    }
}

fn require_unbounded(sc: &Scenario) -> Result<()> {
    sc.validate()?;
    if !sc.capacity.is_infinite() {
        return validation("staircase water-filling needs an unbounded battery");
    }
    Ok(())
}

/// Staircase water-filling: finds the transition slots one interval at a
/// time, each as the largest end slot whose water-filled allocation is
/// feasible.
pub fn staircase_waterfill(sc: &Scenario, eps: f64) -> Result<StaircaseResult> {
    require_unbounded(sc)?;
    let k = sc.horizon;
    let mut b = Builder::new(sc);
    while b.next_start() < k {
        let start = b.next_start();
        let mut accepted = None;
        for end in (start..k).rev() {
            if let Some(wf) = try_interval(sc, start, end, eps)? {
                accepted = Some((end, wf));
                break;
            }
        }
        let (end, wf) = accepted.expect("a single-slot interval is always feasible");
        b.push(end, wf);
    }
    Ok(b.finish())
}

/// Extends an optimal solution by one slot with SNR `new_snr`, where
/// `new_harvest` is the energy harvested during the old last slot.
///
/// Each interval of `prev` is tested only for extension to the new slot; the
/// first one that extends becomes the last interval. Returns the extended
/// scenario with the result.
pub fn update_with_new_slot(
    prev: &StaircaseResult,
    sc_old: &Scenario,
    new_snr: f64,
    new_harvest: f64,
    eps: f64,
) -> Result<(Scenario, StaircaseResult)> {
    require_unbounded(sc_old)?;
    let k_old = sc_old.horizon;
    let consistent = prev.allocation.len() == k_old
        && prev.water_levels.len() == k_old
        && prev.transition_slots.last() == Some(&k_old)
        && prev.transition_slots.windows(2).all(|w| w[0] < w[1])
        && prev.transition_slots.first().is_some_and(|t| *t >= 1);
    if !consistent {
        return validation("previous result does not belong to this scenario");
    }
    let mut snr = sc_old.snr.clone();
    snr.push(new_snr);
    let mut harvest = sc_old.harvest.clone();
    harvest.push(new_harvest);
    let sc = Scenario::new(
        sc_old.initial_battery,
        sc_old.capacity,
        snr,
        harvest,
        sc_old.h0,
    )?;

    let mut b = Builder::new(&sc);
    for &old_end in &prev.transition_slots {
        let start = b.next_start();
        if let Some(wf) = try_interval(&sc, start, k_old, eps)? {
            b.push(k_old, wf);
            return Ok((sc.clone(), b.finish()));
        }
        // interval kept as before
        let end = old_end - 1;
        b.levels.extend_from_slice(&prev.water_levels[start..=end]);
        b.allocation
            .extend_from_slice(&prev.allocation[start..=end]);
        b.slots.push(old_end);
    }
    let wf =
        try_interval(&sc, k_old, k_old, eps)?.expect("a single-slot interval is always feasible");
    b.push(k_old, wf);
    let result = b.finish();
    Ok((sc, result))
}
