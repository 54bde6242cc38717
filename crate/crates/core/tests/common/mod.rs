#![allow(dead_code)]

use harvest_core::si_models::{Capacity, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// 15-point Kronrod nodes on [0, 1] (positive half) with Kronrod and embedded Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive Gauss-Kronrod integral of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let mut parts = vec![(a, b, gk15(f, a, b))];
    for _ in 0..2000 {
        let total: f64 = parts.iter().map(|p| p.2 .0).sum();
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        if err <= rel_tol * total.abs() || err < 1e-300 {
            break;
        }
        let (i, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .unwrap();
        let (lo, hi, _) = parts.swap_remove(i);
        let m = 0.5 * (lo + hi);
        parts.push((lo, m, gk15(f, lo, m)));
        parts.push((m, hi, gk15(f, m, hi)));
    }
    parts.iter().map(|p| p.2 .0).sum()
}

/// `E1(x)` as `∫_1^∞ e^{-xs}/s ds`, split into geometrically growing pieces.
pub fn e1_quadrature(x: f64) -> f64 {
    let mut total = 0.0;
    let mut lo: f64 = 1.0;
    loop {
        let hi = lo * 2.0;
        let piece = integrate(&|s: f64| (-x * s).exp() / s, lo, hi, 1e-14);
        total += piece;
        if piece.abs() < 1e-18 * total.abs() || x * lo > 800.0 {
            break;
        }
        lo = hi;
    }
    total
}

/// `E[log2(1 + t γ)]` for exponential `γ` with mean `mean`, by quadrature
/// over `u = γ / mean` on a geometric partition of `[0, 80]`.
pub fn rayleigh_quadrature(mean: f64, t: f64) -> f64 {
    let f = |u: f64| (1.0 + t * mean * u).log2() * (-u).exp();
    let mut total = integrate(&f, 0.0, 1e-6, 1e-13);
    let mut lo: f64 = 1e-6;
    while lo < 80.0 {
        let hi = (lo * 4.0).min(80.0);
        total += integrate(&f, lo, hi, 1e-13);
        lo = hi;
    }
    total
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unbounded-battery scenario with `B1, H ~ U[0, 2]` and `γ ~ U[0.1, 10]`.
pub fn random_unbounded(rng: &mut ChaCha8Rng, k: usize) -> Scenario {
    let b1 = rng.random_range(0.0..2.0);
    let snr = (0..k).map(|_| rng.random_range(0.1..10.0)).collect();
    let harvest = (0..k - 1).map(|_| rng.random_range(0.0..2.0)).collect();
    Scenario::unbounded(b1, snr, harvest).unwrap()
}

/// Two-slot scenario; half of them get a finite capacity in `[B1, B1 + 2]`.
pub fn random_pair(rng: &mut ChaCha8Rng) -> Scenario {
    let b1 = rng.random_range(0.0..2.0);
    let h1 = rng.random_range(0.0..2.0);
    let snr = vec![rng.random_range(0.1..10.0), rng.random_range(0.1..10.0)];
    let cap = if rng.random_bool(0.5) {
        Capacity::Infinite
    } else {
        Capacity::Finite(b1 + rng.random_range(0.0..2.0))
    };
    Scenario::new(b1, cap, snr, vec![h1], 0.0).unwrap()
}
