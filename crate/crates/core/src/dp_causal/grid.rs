use serde::{Deserialize, Serialize};

use crate::channel::gauss_laguerre;
use crate::error::{validation, Result};
use crate::grid::UniformGrid;
use crate::si_models::{BatteryModel, Capacity, HarvestProcess, SnrProcess, StochasticModel};

/// Nodes used to integrate over a Rayleigh-faded SNR.
pub const RAYLEIGH_NODES: usize = 32;

/// One side-information coordinate of the state, per slot.
///
/// `points[k]` is the support at slot `k` (0-based) and `transitions[k][i][j]`
/// the probability of moving from `points[k][i]` to `points[k + 1][j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub points: Vec<Vec<f64>>,
    pub transitions: Vec<Vec<Vec<f64>>>,
    /// All transition rows coincide, so expectations do not depend on the
    /// current value.
    pub memoryless: bool,
    /// Mean of a Rayleigh-faded SNR whose support is a quadrature rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rayleigh_mean: Option<f64>,
}

impl Axis {
    fn stationary(
        horizon: usize,
        support: Vec<f64>,
        kernel: Vec<Vec<f64>>,
        memoryless: bool,
    ) -> Self {
        Axis {
            points: vec![support; horizon],
            transitions: vec![kernel; horizon.saturating_sub(1)],
            memoryless,
            rayleigh_mean: None,
        }
    }

    fn iid(horizon: usize, support: Vec<f64>, probs: Vec<f64>) -> Self {
        let kernel = vec![probs; support.len()];
        Axis::stationary(horizon, support, kernel, true)
    }

    fn sequence(values: Vec<f64>) -> Self {
        let n = values.len();
        Axis {
            points: values.into_iter().map(|v| vec![v]).collect(),
            transitions: vec![vec![vec![1.0]]; n.saturating_sub(1)],
            memoryless: true,
            rayleigh_mean: None,
        }
    }

    fn for_snr(process: &SnrProcess, horizon: usize) -> Result<Self> {
        Ok(match process {
            SnrProcess::Trace { values } => {
                if values.len() < horizon {
                    return validation(format!(
                        "SNR trace has {} entries, need {horizon}",
                        values.len()
                    ));
                }
                Axis::sequence(values[..horizon].to_vec())
            }
            SnrProcess::Iid(d) => Axis::iid(horizon, d.support().to_vec(), d.probs().to_vec()),
            SnrProcess::Markov(c) => {
                Axis::stationary(horizon, c.support().to_vec(), c.kernel().to_vec(), false)
            }
            SnrProcess::Awgn { mean } => Axis::iid(horizon, vec![*mean], vec![1.0]),
            SnrProcess::Rayleigh { mean } => {
                let (nodes, weights) = gauss_laguerre(RAYLEIGH_NODES);
                let support = nodes.iter().map(|x| mean * x).collect();
                let mut axis = Axis::iid(horizon, support, weights);
                axis.rayleigh_mean = Some(*mean);
                axis
            }
        })
    }

    /// Harvest coordinate of slot `k` is `H_{k-1}`.
    fn for_harvest(process: &HarvestProcess, horizon: usize) -> Result<Self> {
        Ok(match process {
            HarvestProcess::Trace { values, h0 } => {
                if values.len() + 1 < horizon {
                    return validation(format!(
                        "harvest trace has {} entries, need {}",
                        values.len(),
                        horizon - 1
                    ));
                }
                let seq = std::iter::once(*h0)
                    .chain(values[..horizon - 1].iter().copied())
                    .collect();
                Axis::sequence(seq)
            }
            HarvestProcess::Iid(d) => Axis::iid(horizon, d.support().to_vec(), d.probs().to_vec()),
            HarvestProcess::Markov(c) => {
                Axis::stationary(horizon, c.support().to_vec(), c.kernel().to_vec(), false)
            }
        })
    }

    pub fn len_at(&self, k: usize) -> usize {
        self.points[k].len()
    }

    /// Index of the support point nearest to `value` at slot `k`.
    pub fn nearest(&self, k: usize, value: f64) -> usize {
        let pts = &self.points[k];
        let mut best = 0;
        for (i, p) in pts.iter().enumerate() {
            if (p - value).abs() < (pts[best] - value).abs() {
                best = i;
            }
        }
        best
    }

    /// Number of distinct expectation rows at slot `k`.
    pub(crate) fn rows_at(&self, k: usize) -> usize {
        if self.memoryless {
            1
        } else {
            self.len_at(k)
        }
    }

    pub(crate) fn row_of(&self, i: usize) -> usize {
        if self.memoryless {
            0
        } else {
            i
        }
    }
}

/// Discretized state space `(γ_k, H_{k-1}, B_k)` for every slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateGrid {
    pub horizon: usize,
    pub battery: UniformGrid,
    pub capacity: Capacity,
    pub snr: Axis,
    pub harvest: Axis,
}

impl StateGrid {
    /// Grid with battery step `step` over `[0, B_max]`, or over the reachable
    /// range `[0, max B_1 + (K-1) max H]` when the battery is unbounded.
    pub fn new(
        model: &StochasticModel,
        battery: &BatteryModel,
        horizon: usize,
        step: f64,
    ) -> Result<Self> {
        if horizon == 0 {
            return validation("K must be >= 1");
        }
        model.validate()?;
        battery.validate()?;
        let top = match battery.capacity {
            Capacity::Finite(c) => c,
            Capacity::Infinite => {
                battery.initial.max() + (horizon - 1) as f64 * model.harvest.max_value()
            }
        };
        Ok(StateGrid {
            horizon,
            battery: UniformGrid::new(top, step)?,
            capacity: battery.capacity,
            snr: Axis::for_snr(&model.snr, horizon)?,
            harvest: Axis::for_harvest(&model.harvest, horizon)?,
        })
    }

    /// Number of grid states at slot `k` (0-based).
    pub fn states_at(&self, k: usize) -> usize {
        self.snr.len_at(k) * self.harvest.len_at(k) * self.battery.len()
    }

    pub fn total_states(&self) -> usize {
        (0..self.horizon).map(|k| self.states_at(k)).sum()
    }

    /// Flat offset of the battery column for `(si, hi)` at slot `k`.
    pub fn column(&self, k: usize, si: usize, hi: usize) -> usize {
        (si * self.harvest.len_at(k) + hi) * self.battery.len()
    }

    /// Battery level after adding harvest `h` to residual `r`, clipped to the
    /// capacity and to the top of the grid.
    pub(crate) fn refill(&self, r: f64, h: f64) -> f64 {
        (r + h).min(self.capacity.value()).min(self.battery.top())
    }
}
