mod common;

use harvest_core::si_models::{
    battery_step, sample_scenario, Capacity, DiscreteDist, HarvestProcess, MarkovChain, Scenario,
    SnrProcess, StochasticModel, SystemModel,
};
use proptest::prelude::*;

fn capacity() -> impl Strategy<Value = Capacity> {
    prop_oneof![
        Just(Capacity::Infinite),
        (0.0f64..5.0).prop_map(Capacity::Finite)
    ]
}

proptest! {
    #[test]
    fn battery_step_stays_in_range(b in 0.0f64..5.0, frac in 0.0f64..=1.0, h in 0.0f64..3.0, cap in capacity()) {
        let b = cap.clip(b);
        let next = battery_step(b, frac * b, h, cap).unwrap();
        prop_assert!(next >= 0.0 && next <= cap.value());
    }

    #[test]
    fn battery_step_monotone(b in 0.0f64..5.0, t in 0.0f64..1.0, d in 0.0f64..1.0, h in 0.0f64..3.0, cap in capacity()) {
        let t = t.min(b);
        let lo = battery_step(b, t, h, cap).unwrap();
        let hi = battery_step(b + d, t, h, cap).unwrap();
        prop_assert!(hi >= lo);
        let less = battery_step(b, (t + d).min(b), h, cap).unwrap();
        prop_assert!(less <= lo);
    }

    #[test]
    fn battery_step_rejects_overdraw(b in 0.0f64..5.0, extra in 1e-6f64..1.0, h in 0.0f64..1.0) {
        prop_assert!(battery_step(b, b + extra, h, Capacity::Infinite).is_err());
        prop_assert!(battery_step(b, -extra, h, Capacity::Infinite).is_err());
    }

    #[test]
    fn scenario_json_round_trip(k in 1usize..6, seed in 0u64..1000, finite in any::<bool>()) {
        let mut rng = common::rng(seed);
        let base = common::random_unbounded(&mut rng, k);
        let cap = if finite { Capacity::Finite(base.initial_battery + 0.3) } else { Capacity::Infinite };
        let sc = Scenario::new(base.initial_battery, cap, base.snr.clone(), base.harvest.clone(), 0.25).unwrap();
        let back = Scenario::from_json(&sc.to_json().unwrap()).unwrap();
        prop_assert_eq!(sc, back);
    }
}

#[test]
fn scenario_file_format() {
    let text =
        r#"{"K": 2, "B1": 1.0, "Bmax": "inf", "snr": [1.0, 3.0], "harvest": [0.5], "h0": 0.25}"#;
    let sc = Scenario::from_json(text).unwrap();
    assert_eq!(sc.horizon, 2);
    assert!(sc.capacity.is_infinite());
    assert_eq!(sc.h0, 0.25);
    assert!(Scenario::from_json(
        r#"{"K": 2, "B1": 1, "Bmax": 2, "snr": [1, 3], "harvest": [-0.5]}"#
    )
    .is_err());
    assert!(Scenario::from_json(
        r#"{"K": 3, "B1": 1, "Bmax": 2, "snr": [1, 3], "harvest": [0.5]}"#
    )
    .is_err());
    assert!(
        Scenario::from_json(r#"{"K": 1, "B1": 3, "Bmax": 2, "snr": [1], "harvest": []}"#).is_err()
    );
}

#[test]
fn model_file_round_trip() {
    let text = r#"{
        "snr": {"kind": "markov", "support": [0.5, 2.0], "kernel": [[0.9, 0.1], [0.2, 0.8]], "initial": 0.5},
        "harvest": {"kind": "iid", "support": [0.0, 0.5, 1.0], "probs": [0.25, 0.5, 0.25]},
        "battery": {"initial": 1.0, "capacity": 2.0}
    }"#;
    let m = SystemModel::from_json(text).unwrap();
    assert!(matches!(m.processes.snr, SnrProcess::Markov(_)));
    assert_eq!(SystemModel::from_json(&m.to_json().unwrap()).unwrap(), m);
    let bad = text.replace("[0.9, 0.1]", "[0.9, 0.2]");
    assert!(SystemModel::from_json(&bad).is_err());
}

#[test]
fn invalid_distributions_are_rejected() {
    assert!(DiscreteDist::new(vec![0.0, 1.0], vec![0.5, 0.6]).is_err());
    assert!(DiscreteDist::new(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
    assert!(DiscreteDist::new(vec![-1.0, 0.0], vec![0.5, 0.5]).is_err());
    assert!(MarkovChain::new(vec![0.0, 1.0], vec![vec![1.0, 0.0]], 0.0).is_err());
    assert!(MarkovChain::new(vec![0.0, 1.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]], 0.5).is_err());
}

#[test]
fn iid_sampling_passes_chi_square() {
    let probs = [0.2, 0.5, 0.3];
    let support = vec![0.0, 0.5, 1.0];
    let model = StochasticModel {
        snr: SnrProcess::Iid(DiscreteDist::new(vec![1.0, 2.0, 4.0], probs.to_vec()).unwrap()),
        harvest: HarvestProcess::Iid(DiscreteDist::new(support.clone(), probs.to_vec()).unwrap()),
    };
    let n = 100_000;
    let sc = sample_scenario(&model, n, 0.0, Capacity::Infinite, 11).unwrap();
    // chi-square critical value for 2 degrees of freedom at the 1% level
    let critical = 9.210;
    let statistic = |values: &[f64], levels: &[f64]| {
        let counts: Vec<f64> = levels
            .iter()
            .map(|l| values.iter().filter(|v| *v == l).count() as f64)
            .collect();
        assert_eq!(counts.iter().sum::<f64>(), values.len() as f64);
        counts
            .iter()
            .zip(&probs)
            .map(|(c, p)| {
                let e = p * values.len() as f64;
                (c - e).powi(2) / e
            })
            .sum::<f64>()
    };
    assert!(statistic(&sc.snr, &[1.0, 2.0, 4.0]) < critical);
    let mut harvest = sc.harvest.clone();
    harvest.push(sc.h0);
    assert!(statistic(&harvest, &support) < critical);
}

#[test]
fn markov_sampling_follows_kernel() {
    let chain =
        MarkovChain::new(vec![0.0, 1.0], vec![vec![0.9, 0.1], vec![0.3, 0.7]], 0.0).unwrap();
    let model = StochasticModel {
        snr: SnrProcess::Awgn { mean: 1.0 },
        harvest: HarvestProcess::Markov(chain),
    };
    let sc = sample_scenario(&model, 200_001, 0.0, Capacity::Infinite, 5).unwrap();
    assert_eq!(sc.h0, 0.0);
    let path: Vec<f64> = std::iter::once(sc.h0)
        .chain(sc.harvest.iter().copied())
        .collect();
    let (mut from0, mut stay0, mut from1, mut stay1) = (0.0, 0.0, 0.0, 0.0);
    for w in path.windows(2) {
        if w[0] == 0.0 {
            from0 += 1.0;
            stay0 += (w[1] == 0.0) as u8 as f64;
        } else {
            from1 += 1.0;
            stay1 += (w[1] == 1.0) as u8 as f64;
        }
    }
    assert!((stay0 / from0 - 0.9).abs() < 0.01);
    assert!((stay1 / from1 - 0.7).abs() < 0.01);
}

#[test]
fn sampling_is_reproducible() {
    let model = StochasticModel {
        snr: SnrProcess::Rayleigh { mean: 2.0 },
        harvest: HarvestProcess::Iid(DiscreteDist::uniform(vec![0.0, 0.5, 1.0]).unwrap()),
    };
    let a = sample_scenario(&model, 20, 1.0, Capacity::Infinite, 99).unwrap();
    let b = sample_scenario(&model, 20, 1.0, Capacity::Infinite, 99).unwrap();
    let c = sample_scenario(&model, 20, 1.0, Capacity::Infinite, 100).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}
