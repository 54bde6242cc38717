//! Allocation with full (non-causal) side information.
//!
//! With an unbounded battery the problem is convex with cumulative energy
//! constraints, and the optimum is a staircase water-filling: the horizon
//! splits at transition slots where the battery runs empty, each interval is
//! water-filled with its own harvested energy, and the water levels never
//! decrease. A finite battery is handled by a deterministic dynamic program,
//! and two slots have a closed form.

mod finite;
mod k2;
mod staircase;
mod waterfill;

pub use finite::dp_full_finite_bmax;
pub use k2::{closed_form_k2, K2Solution, Mode};
pub use staircase::{staircase_waterfill, update_with_new_slot, StaircaseResult};
pub use waterfill::{waterfill, WaterFillResult, DEFAULT_EPS};
