//! Mutual-information functions of SNR and per-symbol transmit energy.
//!
//! Every rate in the crate is in bits per symbol. The Rayleigh closed form is
//! naturally expressed in nats and is rescaled by `1/ln 2` here.

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::error::{Error, Result};

const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;

/// Linear-scale signal-to-noise power ratio.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Snr(f64);

impl Snr {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Snr(value))
        } else {
            Err(Error::Domain(format!(
                "SNR must be finite and >= 0, got {value}"
            )))
        }
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Snr::new(10f64.powf(db / 10.0))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Decibel value; `-inf` for a zero SNR.
    pub fn to_db(self) -> f64 {
        10.0 * self.0.log10()
    }
}

impl TryFrom<f64> for Snr {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Snr::new(value)
    }
}

impl From<Snr> for f64 {
    fn from(s: Snr) -> f64 {
        s.0
    }
}

/// Energy per symbol (normalized units).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Energy(f64);

impl Energy {
    pub const ZERO: Energy = Energy(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Energy(value))
        } else {
            Err(Error::Domain(format!(
                "energy must be finite and >= 0, got {value}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Energy {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Energy::new(value)
    }
}

impl From<Energy> for f64 {
    fn from(e: Energy) -> f64 {
        e.0
    }
}

/// `log2(1 + t * snr)` without argument validation, for inner loops.
#[inline]
pub(crate) fn rate(snr: f64, t: f64) -> f64 {
    (t * snr).ln_1p() / LN_2
}

/// Gaussian-signalling mutual information `log2(1 + t * snr)` in bits per symbol.
pub fn mutual_info(snr: Snr, t: Energy) -> f64 {
    rate(snr.0, t.0)
}

/// Expected mutual information over an AWGN channel with constant SNR.
///
/// Identical to [`mutual_info`]; it exists so i.i.d. dynamic-programming code
/// can treat AWGN and Rayleigh channels through one interface.
pub fn expected_mi_awgn(mean_snr: Snr, t: Energy) -> f64 {
    mutual_info(mean_snr, t)
}

/// Exponential integral `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn exp_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("E1 requires finite x > 0, got {x}")));
    }
    if x <= 1.0 {
        Ok(e1_series(x))
    } else {
        Ok(e1_scaled_cf(x) * (-x).exp())
    }
}

/// `e^x E1(x)`, which stays finite where `e^x` alone would overflow.
pub(crate) fn e1_scaled(x: f64) -> f64 {
    if x <= 1.0 {
        e1_series(x) * x.exp()
    } else {
        e1_scaled_cf(x)
    }
}

fn e1_series(x: f64) -> f64 {
    let mut sum = -x.ln() - EULER_MASCHERONI;
    let mut fact = 1.0;
    for i in 1..200 {
        let i = i as f64;
        fact *= -x / i;
        let del = -fact / i;
        sum += del;
        if del.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum
}

/// Modified Lentz evaluation of the continued fraction for `e^x E1(x)`.
fn e1_scaled_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Expected mutual information (bits) under Rayleigh fading with mean SNR
/// `mean_snr`: `exp(1/(γ̄t)) E1(1/(γ̄t)) / ln 2`, and 0 at `t = 0`.
pub fn expected_mi_rayleigh(mean_snr: Snr, t: Energy) -> Result<f64> {
    if mean_snr.0 <= 0.0 {
        return Err(Error::Domain("Rayleigh mean SNR must be > 0".into()));
    }
    Ok(rayleigh_rate(mean_snr.0, t.0))
}

#[inline]
pub(crate) fn rayleigh_rate(mean_snr: f64, t: f64) -> f64 {
    let prod = mean_snr * t;
    if prod <= 0.0 {
        return 0.0;
    }
    let u = 1.0 / prod;
    if u > 1e300 {
        // e^u E1(u) ~ 1/u
        return prod / LN_2;
    }
    e1_scaled(u) / LN_2
}

/// Gauss–Laguerre nodes and weights for `∫_0^∞ f(x) e^{-x} dx`.
///
/// The weights sum to one, so `(nodes, weights)` is also a discrete
/// approximation of the unit-mean exponential distribution.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one node");
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let mut z = 0.0f64;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - nodes[i - 2])
            }
        };
        let mut pp = 0.0;
        let mut p2 = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = (nf * p1 - nf * p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = -1.0 / (pp * nf * p2);
    }
    (nodes, weights)
}
