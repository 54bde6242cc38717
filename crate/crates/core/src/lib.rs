//! Transmit-energy allocation for a point-to-point link powered by an energy
//! harvester with a finite or unbounded battery.
//!
//! Rates are mutual information in bits per symbol; energies are per symbol.

// `!(x >= 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod dp_causal;
pub mod error;
pub mod fullsi;
pub mod grid;
pub mod heuristics;
pub mod oracle;
pub mod si_models;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
