//! Causal baselines that look only at the slot index and the battery.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeuristicKind {
    /// Spend the whole battery every slot.
    Naive,
    /// Spend half the battery, and all of it in the last slot.
    PowerHalving,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicPolicy {
    pub kind: HeuristicKind,
    pub horizon: usize,
}

impl HeuristicPolicy {
    pub fn new(kind: HeuristicKind, horizon: usize) -> Self {
        HeuristicPolicy { kind, horizon }
    }

    /// Energy to spend in slot `k` (1-based) with `b` stored.
    pub fn decide(&self, k: usize, b: f64) -> Result<f64> {
        if k == 0 || k > self.horizon {
            return validation(format!("slot {k} outside 1..={}", self.horizon));
        }
        if !(b >= 0.0 && b.is_finite()) {
            return validation(format!("battery level {b} must be finite and >= 0"));
        }
        Ok(match self.kind {
            HeuristicKind::Naive => b,
            HeuristicKind::PowerHalving if k == self.horizon => b,
            HeuristicKind::PowerHalving => 0.5 * b,
        })
    }
}
