//! Monte Carlo evaluation of allocation schemes.
//!
//! Run `r` of an experiment with seed `s` draws its realization from the
//! stream `(s, r)`, so every scheme sees the same realizations and results do
//! not depend on how runs are spread across threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::dp_causal::{solve_model, PolicyTable};
use crate::error::{validation, Error, Result};
use crate::fullsi::{dp_full_finite_bmax, staircase_waterfill, DEFAULT_EPS};
use crate::heuristics::{HeuristicKind, HeuristicPolicy};
use crate::si_models::{sample_scenario_with, stream_rng, Scenario, SystemModel};
use crate::stats::Estimate;

/// Battery step used by the full-SI scheme when the battery is finite.
pub const FULL_SI_GRID_STEP: f64 = 1e-3;
/// Default battery step of the causal dynamic program.
pub const DEFAULT_GRID_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    #[serde(rename = "naive")]
    Naive,
    #[serde(rename = "half")]
    Half,
    #[serde(rename = "causal-dp")]
    CausalDp,
    #[serde(rename = "full-si")]
    FullSi,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Naive,
        SchemeKind::Half,
        SchemeKind::CausalDp,
        SchemeKind::FullSi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Naive => "naive",
            SchemeKind::Half => "half",
            SchemeKind::CausalDp => "causal-dp",
            SchemeKind::FullSi => "full-si",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown scheme {s:?}")))
    }
}

/// A scheme ready to run; the causal DP carries its precomputed table.
#[derive(Debug, Clone)]
pub enum Scheme {
    Naive,
    Half,
    CausalDp(Box<PolicyTable>),
    FullSi,
}

impl Scheme {
    pub fn kind(&self) -> SchemeKind {
        match self {
            Scheme::Naive => SchemeKind::Naive,
            Scheme::Half => SchemeKind::Half,
            Scheme::CausalDp(_) => SchemeKind::CausalDp,
            Scheme::FullSi => SchemeKind::FullSi,
        }
    }

    /// Builds a scheme, solving the causal DP with battery step `grid_step`
    /// when needed.
    pub fn prepare(
        kind: SchemeKind,
        system: &SystemModel,
        horizon: usize,
        grid_step: f64,
    ) -> Result<Self> {
        Ok(match kind {
            SchemeKind::Naive => Scheme::Naive,
            SchemeKind::Half => Scheme::Half,
            SchemeKind::FullSi => Scheme::FullSi,
            SchemeKind::CausalDp => {
                let (_, table) =
                    solve_model(&system.processes, &system.battery, horizon, grid_step)?;
                Scheme::CausalDp(Box::new(table))
            }
        })
    }

    fn check(&self, system: &SystemModel, horizon: usize) -> Result<()> {
        if let Scheme::CausalDp(t) = self {
            if t.model != system.processes || t.battery != system.battery {
                return validation("causal-dp table was built for a different model");
            }
            if t.horizon() != horizon {
                return validation(format!(
                    "causal-dp table is for K = {}, not {horizon}",
                    t.horizon()
                ));
            }
        }
        Ok(())
    }

    /// Allocation chosen on one realization.
    pub fn allocate(&self, sc: &Scenario) -> Result<Vec<f64>> {
        let k = sc.horizon;
        match self {
            Scheme::Naive | Scheme::Half => {
                let kind = if matches!(self, Scheme::Naive) {
                    HeuristicKind::Naive
                } else {
                    HeuristicKind::PowerHalving
                };
                let p = HeuristicPolicy::new(kind, k);
                sc.run_causal(|slot, _, _, b| p.decide(slot, b))
            }
            Scheme::CausalDp(t) => sc.run_causal(|slot, g, h, b| t.decide(slot, g, h, b)),
            Scheme::FullSi => {
                let alloc = if sc.capacity.is_infinite() {
                    staircase_waterfill(sc, DEFAULT_EPS)?.allocation
                } else {
                    dp_full_finite_bmax(sc, FULL_SI_GRID_STEP)?
                };
                sc.replay(&alloc)?;
                Ok(alloc)
            }
        }
    }
}

/// Per-scheme throughput statistics, one CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub scheme: SchemeKind,
    #[serde(rename = "K")]
    pub horizon: usize,
    /// Mean SNR in dB, when the SNR process has a fixed mean.
    pub snr_db: Option<f64>,
    pub runs: usize,
    pub mean_bits_per_slot: f64,
    pub std_err: f64,
    pub seed: u64,
}

/// Per-run throughput per slot of several schemes on common realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedRuns {
    pub schemes: Vec<SchemeKind>,
    pub horizon: usize,
    pub snr_db: Option<f64>,
    pub seed: u64,
    /// `samples[i][r]`: scheme `i`, run `r`.
    pub samples: Vec<Vec<f64>>,
}

impl PairedRuns {
    pub fn estimate(&self, i: usize) -> Estimate {
        Estimate::from_samples(&self.samples[i])
    }

    /// Statistics of the per-run difference `scheme i - scheme j`.
    pub fn difference(&self, i: usize, j: usize) -> Estimate {
        let d: Vec<f64> = self.samples[i]
            .iter()
            .zip(&self.samples[j])
            .map(|(a, b)| a - b)
            .collect();
        Estimate::from_samples(&d)
    }

    pub fn report(&self, i: usize) -> SimReport {
        let e = self.estimate(i);
        SimReport {
            scheme: self.schemes[i],
            horizon: self.horizon,
            snr_db: self.snr_db,
            runs: e.runs,
            mean_bits_per_slot: e.mean,
            std_err: e.std_err,
            seed: self.seed,
        }
    }

    pub fn reports(&self) -> Vec<SimReport> {
        (0..self.schemes.len()).map(|i| self.report(i)).collect()
    }
}

fn mean_snr_db(system: &SystemModel) -> Option<f64> {
    system.processes.snr.mean().map(|m| 10.0 * m.log10())
}

/// Realization `run` of experiment `seed`.
pub fn realization(system: &SystemModel, horizon: usize, seed: u64, run: u64) -> Result<Scenario> {
    let mut rng = stream_rng(seed, run);
    let b1 = system.battery.initial.sample(&mut rng);
    sample_scenario_with(
        &system.processes,
        horizon,
        b1,
        system.battery.capacity,
        &mut rng,
    )
}

/// Runs every scheme on the same `runs` realizations.
pub fn run_paired(
    system: &SystemModel,
    schemes: &[Scheme],
    horizon: usize,
    runs: usize,
    seed: u64,
) -> Result<PairedRuns> {
    if runs == 0 {
        return validation("runs must be >= 1");
    }
    if horizon == 0 {
        return validation("K must be >= 1");
    }
    if schemes.is_empty() {
        return validation("no schemes given");
    }
    system.validate()?;
    for s in schemes {
        s.check(system, horizon)?;
    }
    let per_run: Vec<Vec<f64>> = (0..runs as u64)
        .into_par_iter()
        .map(|r| {
            let sc = realization(system, horizon, seed, r)?;
            schemes
                .iter()
                .map(|s| Ok(sc.throughput(&s.allocate(&sc)?) / horizon as f64))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let samples = (0..schemes.len())
        .map(|i| per_run.iter().map(|row| row[i]).collect())
        .collect();
    Ok(PairedRuns {
        schemes: schemes.iter().map(Scheme::kind).collect(),
        horizon,
        snr_db: mean_snr_db(system),
        seed,
        samples,
    })
}

/// Throughput per slot of one scheme over `runs` realizations.
pub fn run_experiment(
    system: &SystemModel,
    scheme: &Scheme,
    horizon: usize,
    runs: usize,
    seed: u64,
) -> Result<SimReport> {
    Ok(run_paired(system, std::slice::from_ref(scheme), horizon, runs, seed)?.report(0))
}

/// One experiment per `(K, mean SNR)` pair, in that nesting order. The
/// template's SNR process must be AWGN or Rayleigh so its mean can be set.
pub fn sweep(
    template: &SystemModel,
    kind: SchemeKind,
    horizons: &[usize],
    snr_db: &[f64],
    runs: usize,
    seed: u64,
    grid_step: f64,
) -> Result<Vec<SimReport>> {
    if horizons.is_empty() || snr_db.is_empty() {
        return validation("sweep needs at least one K and one SNR");
    }
    let mut out = Vec::with_capacity(horizons.len() * snr_db.len());
    for &k in horizons {
        for &db in snr_db {
            let system = with_mean_snr_db(template, db)?;
            let scheme = Scheme::prepare(kind, &system, k, grid_step)?;
            let mut report = run_experiment(&system, &scheme, k, runs, seed)?;
            report.snr_db = Some(db);
            out.push(report);
        }
    }
    Ok(out)
}

/// Copy of `system` whose (AWGN or Rayleigh) SNR has mean `db` decibels.
pub fn with_mean_snr_db(system: &SystemModel, db: f64) -> Result<SystemModel> {
    let mut s = system.clone();
    s.processes.snr = system.processes.snr.with_mean(10f64.powf(db / 10.0))?;
    Ok(s)
}
