//! Side-information processes (SNR and harvested energy), problem scenarios
//! and the linear battery dynamics.
//!
//! The SNR and harvest processes are independent. Each is either a
//! deterministic trace, an i.i.d. draw from a finite distribution, or a
//! first-order Markov chain over a finite support. The SNR process also has
//! two analytic forms, constant AWGN and i.i.d. Rayleigh fading, described by
//! their mean.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::path::Path;

use crate::error::{validation, Error, Result};

/// Absolute slack allowed when checking `t <= b` on replayed allocations.
pub const FEASIBILITY_TOL: f64 = 1e-9;

const PROB_TOL: f64 = 1e-9;

/// Battery capacity `B_max`, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Capacity {
    Finite(f64),
    Infinite,
}

impl Capacity {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Capacity::Infinite)
    }

    /// Capacity as a float, `+inf` when unbounded.
    pub fn value(&self) -> f64 {
        match *self {
            Capacity::Finite(v) => v,
            Capacity::Infinite => f64::INFINITY,
        }
    }

    pub fn clip(&self, b: f64) -> f64 {
        b.min(self.value())
    }
}

impl Serialize for Capacity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Capacity::Finite(v) => s.serialize_f64(v),
            Capacity::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Capacity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) if v.is_finite() && v >= 0.0 => Ok(Capacity::Finite(v)),
            Raw::Num(v) => Err(serde::de::Error::custom(format!("invalid capacity {v}"))),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinite" | "Infinity") => {
                Ok(Capacity::Infinite)
            }
            Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid capacity {t:?}"))),
        }
    }
}

/// Linear battery update `min(b - t + h, bmax)`.
///
/// Fails when `t` is negative or exceeds the stored energy `b` by more than
/// [`FEASIBILITY_TOL`]; the result is floored at zero to absorb that slack.
pub fn battery_step(b: f64, t: f64, h: f64, capacity: Capacity) -> Result<f64> {
    if !(t >= 0.0) || t > b + FEASIBILITY_TOL {
        return Err(Error::Infeasible {
            requested: t,
            available: b,
        });
    }
    Ok(capacity.clip(b - t + h).max(0.0))
}

/// Finite probability distribution over a strictly increasing support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDist")]
pub struct DiscreteDist {
    support: Vec<f64>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDist {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl TryFrom<RawDist> for DiscreteDist {
    type Error = Error;
    fn try_from(raw: RawDist) -> Result<Self> {
        DiscreteDist::new(raw.support, raw.probs)
    }
}

impl DiscreteDist {
    pub fn new(support: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != probs.len() {
            return validation("distribution needs matching, non-empty support and probs");
        }
        if support.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return validation("distribution support must be finite and nonnegative");
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return validation("distribution support must be strictly increasing");
        }
        check_row(&probs, "distribution")?;
        Ok(DiscreteDist { support, probs })
    }

    pub fn uniform(support: Vec<f64>) -> Result<Self> {
        let p = 1.0 / support.len().max(1) as f64;
        let probs = vec![p; support.len()];
        DiscreteDist::new(support, probs)
    }

    pub fn point(value: f64) -> Result<Self> {
        DiscreteDist::new(vec![value], vec![1.0])
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.probs)
            .map(|(v, p)| v * p)
            .sum()
    }

    pub fn max(&self) -> f64 {
        *self.support.last().unwrap()
    }

    /// Draws a support index.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_row(&self.probs, rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.support[self.sample_index(rng)]
    }
}

fn check_row(probs: &[f64], what: &str) -> Result<()> {
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return validation(format!("{what}: probabilities must be finite and >= 0"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return validation(format!("{what}: probabilities sum to {total}, not 1"));
    }
    Ok(())
}

fn sample_row<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // u landed in the rounding gap above the cumulative sum
    probs
        .iter()
        .rposition(|p| *p > 0.0)
        .unwrap_or(probs.len() - 1)
}

/// Position of `value` in a sorted support, with a relative tolerance.
pub(crate) fn find_in_support(support: &[f64], value: f64) -> Option<usize> {
    let tol = 1e-12 * value.abs().max(1.0);
    support.iter().position(|s| (s - value).abs() <= tol)
}

/// First-order Markov chain over a finite support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChain")]
pub struct MarkovChain {
    support: Vec<f64>,
    kernel: Vec<Vec<f64>>,
    initial: f64,
}

#[derive(Deserialize)]
struct RawChain {
    support: Vec<f64>,
    kernel: Vec<Vec<f64>>,
    initial: f64,
}

impl TryFrom<RawChain> for MarkovChain {
    type Error = Error;
    fn try_from(raw: RawChain) -> Result<Self> {
        MarkovChain::new(raw.support, raw.kernel, raw.initial)
    }
}

impl MarkovChain {
    /// `kernel[i][j]` is the probability of moving from `support[i]` to
    /// `support[j]`; `initial` is the known starting value.
    pub fn new(support: Vec<f64>, kernel: Vec<Vec<f64>>, initial: f64) -> Result<Self> {
        let n = support.len();
        if n == 0 {
            return validation("Markov chain needs a non-empty support");
        }
        if support.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return validation("Markov support must be finite and nonnegative");
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return validation("Markov support must be strictly increasing");
        }
        if kernel.len() != n || kernel.iter().any(|r| r.len() != n) {
            return validation(format!("Markov kernel must be {n}x{n}"));
        }
        for (i, row) in kernel.iter().enumerate() {
            check_row(row, &format!("Markov kernel row {i}"))?;
        }
        if find_in_support(&support, initial).is_none() {
            return validation(format!("Markov initial value {initial} not in support"));
        }
        Ok(MarkovChain {
            support,
            kernel,
            initial,
        })
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn kernel(&self) -> &[Vec<f64>] {
        &self.kernel
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn initial_index(&self) -> usize {
        find_in_support(&self.support, self.initial).expect("validated")
    }

    fn path<R: Rng + ?Sized>(
        &self,
        len: usize,
        start: Option<f64>,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        let mut idx = match start {
            None => self.initial_index(),
            Some(v) => match find_in_support(&self.support, v) {
                Some(i) => i,
                None => return validation(format!("start value {v} not in Markov support")),
            },
        };
        let mut out = Vec::with_capacity(len);
        if len == 0 {
            return Ok(out);
        }
        out.push(self.support[idx]);
        for _ in 1..len {
            idx = sample_row(&self.kernel[idx], rng);
            out.push(self.support[idx]);
        }
        Ok(out)
    }
}

/// SNR process across slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SnrProcess {
    /// Known sequence `γ_1, γ_2, …`.
    Trace {
        values: Vec<f64>,
    },
    Iid(DiscreteDist),
    /// Markov chain whose `initial` value is `γ_1`.
    Markov(MarkovChain),
    /// Constant SNR equal to `mean`.
    Awgn {
        mean: f64,
    },
    /// i.i.d. exponentially distributed SNR with the given mean.
    Rayleigh {
        mean: f64,
    },
}

impl SnrProcess {
    pub fn validate(&self) -> Result<()> {
        match self {
            SnrProcess::Trace { values } => {
                if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return validation("SNR trace entries must be finite and >= 0");
                }
            }
            SnrProcess::Awgn { mean } => {
                if !(mean.is_finite() && *mean >= 0.0) {
                    return validation("AWGN mean SNR must be finite and >= 0");
                }
            }
            SnrProcess::Rayleigh { mean } => {
                if !(mean.is_finite() && *mean > 0.0) {
                    return validation("Rayleigh mean SNR must be finite and > 0");
                }
            }
            SnrProcess::Iid(_) | SnrProcess::Markov(_) => {}
        }
        Ok(())
    }

    /// Mean SNR where it is a fixed property of the process.
    pub fn mean(&self) -> Option<f64> {
        match self {
            SnrProcess::Awgn { mean } | SnrProcess::Rayleigh { mean } => Some(*mean),
            SnrProcess::Iid(d) => Some(d.mean()),
            SnrProcess::Trace { .. } | SnrProcess::Markov(_) => None,
        }
    }

    /// Copy of an analytic process with its mean replaced.
    pub fn with_mean(&self, mean: f64) -> Result<SnrProcess> {
        let p = match self {
            SnrProcess::Awgn { .. } => SnrProcess::Awgn { mean },
            SnrProcess::Rayleigh { .. } => SnrProcess::Rayleigh { mean },
            _ => return validation("only awgn and rayleigh SNR processes can be swept by mean"),
        };
        p.validate()?;
        Ok(p)
    }

    /// `[γ_1, …, γ_k]`, optionally conditioned on a known `γ_1`.
    fn sample_path<R: Rng + ?Sized>(
        &self,
        k: usize,
        first: Option<f64>,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        let mut path = match self {
            SnrProcess::Trace { values } => {
                if values.len() < k {
                    return validation(format!("SNR trace has {} entries, need {k}", values.len()));
                }
                values[..k].to_vec()
            }
            SnrProcess::Iid(d) => (0..k).map(|_| d.sample(rng)).collect(),
            SnrProcess::Markov(c) => c.path(k, first, rng)?,
            SnrProcess::Awgn { mean } => vec![*mean; k],
            SnrProcess::Rayleigh { mean } => (0..k)
                .map(|_| {
                    let e: f64 = Exp1.sample(rng);
                    mean * e
                })
                .collect(),
        };
        if let (Some(v), Some(p)) = (first, path.first_mut()) {
            *p = v;
        }
        Ok(path)
    }
}

/// Harvested-energy process across slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HarvestProcess {
    /// Known harvests `H_1, H_2, …` with `h0` as the value before slot 1.
    Trace {
        values: Vec<f64>,
        #[serde(default)]
        h0: f64,
    },
    Iid(DiscreteDist),
    /// Markov chain whose `initial` value is `H_0`.
    Markov(MarkovChain),
}

impl HarvestProcess {
    pub fn validate(&self) -> Result<()> {
        if let HarvestProcess::Trace { values, h0 } = self {
            if values
                .iter()
                .chain(std::iter::once(h0))
                .any(|v| !(v.is_finite() && *v >= 0.0))
            {
                return validation("harvest trace entries must be finite and >= 0");
            }
        }
        Ok(())
    }

    /// Largest harvest any slot can deliver.
    pub fn max_value(&self) -> f64 {
        match self {
            HarvestProcess::Trace { values, h0 } => values.iter().fold(*h0, |a, b| a.max(*b)),
            HarvestProcess::Iid(d) => d.max(),
            HarvestProcess::Markov(c) => *c.support().last().unwrap(),
        }
    }

    /// `[H_0, H_1, …, H_{K-1}]`, optionally conditioned on a known `H_0`.
    fn sample_path<R: Rng + ?Sized>(
        &self,
        k: usize,
        first: Option<f64>,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        let mut path = match self {
            HarvestProcess::Trace { values, h0 } => {
                if values.len() + 1 < k {
                    return validation(format!(
                        "harvest trace has {} entries, need {}",
                        values.len(),
                        k - 1
                    ));
                }
                std::iter::once(*h0)
                    .chain(values[..k - 1].iter().copied())
                    .collect()
            }
            HarvestProcess::Iid(d) => (0..k).map(|_| d.sample(rng)).collect(),
            HarvestProcess::Markov(c) => c.path(k, first, rng)?,
        };
        if let (Some(v), Some(p)) = (first, path.first_mut()) {
            *p = v;
        }
        Ok(path)
    }
}

/// The pair of independent SNR and harvest processes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticModel {
    pub snr: SnrProcess,
    pub harvest: HarvestProcess,
}

impl StochasticModel {
    pub fn validate(&self) -> Result<()> {
        self.snr.validate()?;
        self.harvest.validate()
    }
}

/// Distribution of the initial battery level `B_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialBattery {
    Fixed(f64),
    Random(DiscreteDist),
}

impl InitialBattery {
    pub fn max(&self) -> f64 {
        match self {
            InitialBattery::Fixed(v) => *v,
            InitialBattery::Random(d) => d.max(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            InitialBattery::Fixed(v) => *v,
            InitialBattery::Random(d) => d.sample(rng),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryModel {
    pub initial: InitialBattery,
    pub capacity: Capacity,
}

impl BatteryModel {
    pub fn validate(&self) -> Result<()> {
        let b1 = self.initial.max();
        if !(b1.is_finite() && b1 >= 0.0) {
            return validation("initial battery must be finite and >= 0");
        }
        if let InitialBattery::Random(d) = &self.initial {
            if d.support()[0] < 0.0 {
                return validation("initial battery support must be >= 0");
            }
        }
        if b1 > self.capacity.value() {
            return validation("initial battery exceeds capacity");
        }
        Ok(())
    }
}

/// A stochastic model together with its battery: the contents of a model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemModel {
    #[serde(flatten)]
    pub processes: StochasticModel,
    pub battery: BatteryModel,
}

impl SystemModel {
    pub fn validate(&self) -> Result<()> {
        self.processes.validate()?;
        self.battery.validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: SystemModel = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// One deterministic problem instance over `K` slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScenario")]
pub struct Scenario {
    #[serde(rename = "K")]
    pub horizon: usize,
    #[serde(rename = "B1")]
    pub initial_battery: f64,
    #[serde(rename = "Bmax")]
    pub capacity: Capacity,
    /// `γ_1 … γ_K`.
    pub snr: Vec<f64>,
    /// `H_1 … H_{K-1}`.
    pub harvest: Vec<f64>,
    /// `H_0`; only causal policies look at it.
    pub h0: f64,
}

#[derive(Deserialize)]
struct RawScenario {
    #[serde(rename = "K")]
    horizon: usize,
    #[serde(rename = "B1")]
    initial_battery: f64,
    #[serde(rename = "Bmax")]
    capacity: Capacity,
    snr: Vec<f64>,
    harvest: Vec<f64>,
    #[serde(default)]
    h0: f64,
}

impl TryFrom<RawScenario> for Scenario {
    type Error = Error;
    fn try_from(r: RawScenario) -> Result<Self> {
        let sc = Scenario {
            horizon: r.horizon,
            initial_battery: r.initial_battery,
            capacity: r.capacity,
            snr: r.snr,
            harvest: r.harvest,
            h0: r.h0,
        };
        sc.validate()?;
        Ok(sc)
    }
}

impl Scenario {
    pub fn new(
        initial_battery: f64,
        capacity: Capacity,
        snr: Vec<f64>,
        harvest: Vec<f64>,
        h0: f64,
    ) -> Result<Self> {
        let sc = Scenario {
            horizon: snr.len(),
            initial_battery,
            capacity,
            snr,
            harvest,
            h0,
        };
        sc.validate()?;
        Ok(sc)
    }

    /// Scenario with unbounded battery and `H_0 = 0`.
    pub fn unbounded(initial_battery: f64, snr: Vec<f64>, harvest: Vec<f64>) -> Result<Self> {
        Scenario::new(initial_battery, Capacity::Infinite, snr, harvest, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.horizon;
        if k == 0 {
            return validation("K must be >= 1");
        }
        if self.snr.len() != k {
            return validation(format!("snr has {} entries, K = {k}", self.snr.len()));
        }
        if self.harvest.len() != k - 1 {
            return validation(format!(
                "harvest has {} entries, expected K-1 = {}",
                self.harvest.len(),
                k - 1
            ));
        }
        let finite_nonneg = |v: &f64| v.is_finite() && *v >= 0.0;
        if !self.snr.iter().all(finite_nonneg) {
            return validation("snr entries must be finite and >= 0");
        }
        if !self.harvest.iter().all(finite_nonneg) {
            return validation("harvest entries must be finite and >= 0");
        }
        if !finite_nonneg(&self.initial_battery) || !finite_nonneg(&self.h0) {
            return validation("B1 and h0 must be finite and >= 0");
        }
        if let Capacity::Finite(c) = self.capacity {
            if self.initial_battery > c {
                return validation(format!("B1 = {} exceeds Bmax = {c}", self.initial_battery));
            }
        }
        Ok(())
    }

    /// Total energy that can ever be spent, `B_1 + Σ H_k`.
    pub fn total_energy(&self) -> f64 {
        self.initial_battery + self.harvest.iter().sum::<f64>()
    }

    /// Sum throughput (bits) of an allocation; checks its length only.
    pub fn throughput(&self, allocation: &[f64]) -> f64 {
        assert_eq!(allocation.len(), self.horizon, "allocation length");
        self.snr
            .iter()
            .zip(allocation)
            .map(|(g, t)| crate::channel::rate(*g, *t))
            .sum()
    }

    /// Replays an allocation through the battery dynamics and returns the
    /// battery levels `B_1 … B_{K+1}`.
    pub fn replay(&self, allocation: &[f64]) -> Result<Vec<f64>> {
        if allocation.len() != self.horizon {
            return validation("allocation length differs from K");
        }
        let mut levels = Vec::with_capacity(self.horizon + 1);
        let mut b = self.initial_battery;
        levels.push(b);
        for (k, &t) in allocation.iter().enumerate() {
            let h = self.harvest.get(k).copied().unwrap_or(0.0);
            b = battery_step(b, t, h, self.capacity)?;
            levels.push(b);
        }
        Ok(levels)
    }

    /// Runs a causal policy `decide(k, γ_k, H_{k-1}, B_k)` (slots numbered
    /// from 1) through the battery dynamics and returns its allocation.
    pub fn run_causal<F>(&self, mut decide: F) -> Result<Vec<f64>>
    where
        F: FnMut(usize, f64, f64, f64) -> Result<f64>,
    {
        let mut b = self.initial_battery;
        let mut alloc = Vec::with_capacity(self.horizon);
        for k in 0..self.horizon {
            let h_prev = if k == 0 { self.h0 } else { self.harvest[k - 1] };
            let t = decide(k + 1, self.snr[k], h_prev, b)?;
            let h = self.harvest.get(k).copied().unwrap_or(0.0);
            b = battery_step(b, t, h, self.capacity)?;
            alloc.push(t);
        }
        Ok(alloc)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Reproducible generator for realization `stream` of experiment `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws a scenario by ancestral sampling of both processes.
pub fn sample_scenario(
    model: &StochasticModel,
    horizon: usize,
    initial_battery: f64,
    capacity: Capacity,
    seed: u64,
) -> Result<Scenario> {
    sample_scenario_with(
        model,
        horizon,
        initial_battery,
        capacity,
        &mut stream_rng(seed, 0),
    )
}

/// [`sample_scenario`] driven by a caller-owned generator.
pub fn sample_scenario_with<R: Rng + ?Sized>(
    model: &StochasticModel,
    horizon: usize,
    initial_battery: f64,
    capacity: Capacity,
    rng: &mut R,
) -> Result<Scenario> {
    if horizon == 0 {
        return validation("K must be >= 1");
    }
    model.validate()?;
    let snr = model.snr.sample_path(horizon, None, rng)?;
    let mut harvest = model.harvest.sample_path(horizon, None, rng)?;
    let h0 = harvest.remove(0);
    Scenario::new(initial_battery, capacity, snr, harvest, h0)
}

/// Known first-slot state `(γ_1, H_0, B_1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub snr: f64,
    pub harvest: f64,
    pub battery: f64,
}

/// Draws the remainder of a scenario given its first-slot state.
pub fn sample_scenario_from<R: Rng + ?Sized>(
    model: &StochasticModel,
    horizon: usize,
    s1: InitialState,
    capacity: Capacity,
    rng: &mut R,
) -> Result<Scenario> {
    if horizon == 0 {
        return validation("K must be >= 1");
    }
    model.validate()?;
    let snr = model.snr.sample_path(horizon, Some(s1.snr), rng)?;
    let mut harvest = model.harvest.sample_path(horizon, Some(s1.harvest), rng)?;
    let h0 = harvest.remove(0);
    Scenario::new(s1.battery, capacity, snr, harvest, h0)
}
