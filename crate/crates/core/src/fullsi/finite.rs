use crate::channel::rate;
use crate::dp_causal::{continuous_argmax, lattice_argmax, DEFAULT_TOL};
use crate::error::{validation, Result};
use crate::grid::UniformGrid;
use crate::si_models::{battery_step, Scenario};

/// Full-SI allocation for a battery of any capacity by a deterministic
/// backward recursion on a battery grid of step `delta_b`.
///
/// The grid spans `[0, B_max]`, or `[0, B_1 + Σ H]` for an unbounded
/// battery. The forward pass optimizes each slot over the continuum against
/// the interpolated value of the next slot.
pub fn dp_full_finite_bmax(sc: &Scenario, delta_b: f64) -> Result<Vec<f64>> {
    sc.validate()?;
    if !(delta_b > 0.0 && delta_b.is_finite()) {
        return validation(format!("grid step must be > 0, got {delta_b}"));
    }
    let k = sc.horizon;
    if k == 1 {
        return Ok(vec![sc.initial_battery]);
    }
    let top = if sc.capacity.is_infinite() {
        sc.total_energy()
    } else {
        sc.capacity.value()
    };
    let grid = UniformGrid::new(top, delta_b)?;
    let xs = grid.points();
    let cap = sc.capacity.value().min(grid.top());
    let refill = |r: f64, h: f64| (r + h).min(cap);

    // values[j] is J_{j+1} on the grid
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); k];
    values[k - 1] = xs.iter().map(|&x| rate(sc.snr[k - 1], x)).collect();
    for j in (0..k - 1).rev() {
        let h = sc.harvest[j];
        let next = &values[j + 1];
        let cont: Vec<f64> = xs
            .iter()
            .map(|&r| grid.interp(next, refill(r, h)))
            .collect::<Result<_>>()?;
        values[j] = xs
            .iter()
            .map(|&x| lattice_argmax(&grid, &cont, sc.snr[j], x).map(|c| c.value))
            .collect::<Result<_>>()?;
    }

    let mut alloc = Vec::with_capacity(k);
    let mut b = sc.initial_battery;
    for j in 0..k - 1 {
        let h = sc.harvest[j];
        let next = &values[j + 1];
        let v = |r: f64| {
            grid.interp(next, refill(r.max(0.0), h))
                .expect("level lies on the grid")
        };
        let t = continuous_argmax(&v, sc.snr[j], b, DEFAULT_TOL).energy;
        alloc.push(t);
        b = battery_step(b, t, h, sc.capacity)?;
    }
    alloc.push(b);
    Ok(alloc)
}
