//! Oracle cross-checks behind `harvest verify`.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use rand::Rng;

use harvest_core::dp_causal::{solve, StateGrid};
use harvest_core::fullsi::{closed_form_k2, dp_full_finite_bmax, staircase_waterfill, DEFAULT_EPS};
use harvest_core::oracle::{brute_force_causal, brute_force_fullsi, GridSearchConfig};
use harvest_core::si_models::{
    stream_rng, BatteryModel, Capacity, DiscreteDist, HarvestProcess, InitialBattery, Scenario,
    SnrProcess, StochasticModel,
};

use crate::{check_input, ToleranceError};

#[derive(Args)]
pub struct VerifyArgs {
    /// Check one scenario file instead of random instances.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    instances: usize,
    #[arg(long = "max-K", default_value_t = 3)]
    max_horizon: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Lattice spacing of the brute-force search.
    #[arg(long, default_value_t = 1e-3)]
    t_step: f64,
}

#[derive(Default)]
struct Tally {
    checks: usize,
    failures: usize,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        self.checks += 1;
        self.failures += (!ok) as usize;
    }
}

/// Checks the full-SI solvers on one scenario.
fn check_scenario(sc: &Scenario, cfg: &GridSearchConfig, tally: &mut Tally) -> Result<()> {
    let bound = cfg.error_bound(sc);
    let (_, brute) = brute_force_fullsi(sc, cfg)?;
    if sc.capacity.is_infinite() {
        let r = staircase_waterfill(sc, DEFAULT_EPS)?;
        let slack = sc.horizon as f64 * DEFAULT_EPS * GridSearchConfig::slope_bound(sc);
        tally.record(r.throughput_bits >= brute - bound - slack);
    } else {
        let alloc = dp_full_finite_bmax(sc, cfg.t_step)?;
        sc.replay(&alloc)?;
        tally.record((sc.throughput(&alloc) - brute).abs() <= 2.0 * bound);
    }
    if sc.horizon == 2 {
        let (alloc, bits) = closed_form_k2(sc)?.allocation(sc);
        sc.replay(&alloc)?;
        tally.record(bits >= brute - 1e-12 && bits - brute <= bound);
    }
    Ok(())
}

fn random_scenario(rng: &mut impl Rng, k: usize, finite: bool) -> Result<Scenario> {
    let b1 = rng.random_range(0.0..2.0);
    let snr = (0..k).map(|_| rng.random_range(0.1..10.0)).collect();
    let harvest = (0..k - 1).map(|_| rng.random_range(0.0..2.0)).collect();
    let cap = if finite {
        Capacity::Finite(b1 + rng.random_range(0.0..2.0))
    } else {
        Capacity::Infinite
    };
    Ok(Scenario::new(b1, cap, snr, harvest, 0.0)?)
}

fn check_causal(tally: &mut Tally) -> Result<()> {
    let harvest = HarvestProcess::Iid(DiscreteDist::uniform(vec![0.0, 0.5, 1.0])?);
    let models = [
        StochasticModel {
            snr: SnrProcess::Awgn { mean: 10.0 },
            harvest: harvest.clone(),
        },
        StochasticModel {
            snr: SnrProcess::Rayleigh { mean: 10.0 },
            harvest,
        },
    ];
    let battery = BatteryModel {
        initial: InitialBattery::Fixed(1.0),
        capacity: Capacity::Infinite,
    };
    for model in &models {
        for k in 1..=3 {
            let grid = StateGrid::new(model, &battery, k, 0.05)?;
            let (values, _) = solve(model, &grid, k)?;
            let brute = brute_force_causal(model, &grid, k, 10_000)?;
            let gap = values
                .values
                .iter()
                .flatten()
                .zip(brute.values.iter().flatten())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            tally.record(gap <= 1e-9);
        }
    }
    Ok(())
}

pub fn run(a: VerifyArgs) -> Result<()> {
    let cfg = GridSearchConfig {
        t_step: a.t_step,
        ..GridSearchConfig::default()
    };
    let mut full = Tally::default();
    if let Some(path) = &a.scenario {
        check_input(path)?;
        let sc = Scenario::load(path)?;
        check_scenario(&sc, &cfg, &mut full)?;
        println!(
            "scenario {}: {} checks, {} outside tolerance",
            path.display(),
            full.checks,
            full.failures
        );
    } else {
        if a.max_horizon == 0 {
            return Err(crate::input_error("--max-K must be >= 1"));
        }
        let mut rng = stream_rng(a.seed, 0);
        for i in 0..a.instances {
            let k = 1 + i % a.max_horizon;
            let sc = random_scenario(&mut rng, k, i % 2 == 1)?;
            check_scenario(&sc, &cfg, &mut full)?;
        }
        println!(
            "full side information: {} instances, {} checks, {} outside tolerance",
            a.instances, full.checks, full.failures
        );
    }
    let mut causal = Tally::default();
    check_causal(&mut causal)?;
    println!(
        "causal program: {} grids, {} outside tolerance",
        causal.checks, causal.failures
    );
    let failures = full.failures + causal.failures;
    if failures > 0 {
        return Err(ToleranceError(failures).into());
    }
    println!("all within tolerance");
    Ok(())
}
