use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::si_models::Scenario;

/// Regime of the two-slot optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Spend all stored energy in slot 1.
    #[serde(rename = "G")]
    Greedy,
    /// Trade stored energy between the slots according to the SNRs.
    #[serde(rename = "B")]
    Balanced,
    /// Save as much as possible for slot 2 without overflowing the battery.
    #[serde(rename = "C")]
    Conservative,
}

impl Mode {
    pub fn letter(self) -> char {
        match self {
            Mode::Greedy => 'G',
            Mode::Balanced => 'B',
            Mode::Conservative => 'C',
        }
    }
}

/// Optimal first-slot energy of a two-slot scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct K2Solution {
    pub t1: f64,
    pub mode: Mode,
}

impl K2Solution {
    /// Full allocation `[T_1, B_2]` and its throughput in bits.
    pub fn allocation(&self, sc: &Scenario) -> (Vec<f64>, f64) {
        let b2 = sc
            .capacity
            .clip(sc.initial_battery - self.t1 + sc.harvest[0])
            .max(0.0);
        let alloc = vec![self.t1, b2];
        let bits = sc.throughput(&alloc);
        (alloc, bits)
    }
}

/// Closed-form optimum for `K = 2` with full side information.
///
/// With `a = B_max - H_1`, `b = H_1 + 1/γ_2 - 1/γ_1`,
/// `c = 2 B_max - H_1 + 1/γ_2 - 1/γ_1` and `T̃ = (B_1 + b) / 2`:
/// greedy `T_1 = B_1` if `a < 0` or `B_1 < b`; balanced `T_1 = T̃` if
/// `-b <= B_1 <= c`; otherwise conservative `T_1 = [B_1 - a]^+`.
pub fn closed_form_k2(sc: &Scenario) -> Result<K2Solution> {
    sc.validate()?;
    if sc.horizon != 2 {
        return validation(format!("closed form needs K = 2, got K = {}", sc.horizon));
    }
    let b1 = sc.initial_battery;
    let h1 = sc.harvest[0];
    let (g1, g2) = (sc.snr[0], sc.snr[1]);
    let bmax = sc.capacity.value();

    // Dead channels: nothing to gain in slot 1, or nothing to save for.
    if g1 == 0.0 {
        return Ok(K2Solution {
            t1: 0.0,
            mode: Mode::Conservative,
        });
    }
    if g2 == 0.0 {
        return Ok(K2Solution {
            t1: b1,
            mode: Mode::Greedy,
        });
    }

    let a = bmax - h1;
    let b = h1 + 1.0 / g2 - 1.0 / g1;
    let c = 2.0 * bmax - h1 + 1.0 / g2 - 1.0 / g1;
    let t_tilde = 0.5 * (b1 + b);

    let sol = if a < 0.0 || b1 < b {
        K2Solution {
            t1: b1,
            mode: Mode::Greedy,
        }
    } else if -b <= b1 && b1 <= c {
        K2Solution {
            t1: t_tilde.clamp(0.0, b1),
            mode: Mode::Balanced,
        }
    } else {
        // `B_1 - a` is `-inf` for an unbounded battery
        K2Solution {
            t1: (b1 - a).max(0.0).min(b1),
            mode: Mode::Conservative,
        }
    };
    Ok(sol)
}
