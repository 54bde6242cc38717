use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};

/// Uniform battery grid `0 = x_0 < x_1 < … < x_n = top`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    intervals: usize,
    top: f64,
}

impl UniformGrid {
    /// Grid over `[0, top]` whose spacing is the largest value `<= step` that
    /// divides `top` evenly.
    pub fn new(top: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return validation(format!("grid step must be > 0, got {step}"));
        }
        if !(top >= 0.0 && top.is_finite()) {
            return validation(format!("grid top must be finite and >= 0, got {top}"));
        }
        if top == 0.0 {
            return Ok(UniformGrid {
                intervals: 1,
                top: step,
            });
        }
        let intervals = ((top / step) - 1e-9).ceil().max(1.0) as usize;
        Ok(UniformGrid { intervals, top })
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    pub fn step(&self) -> f64 {
        self.top / self.intervals as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        self.top * (j as f64 / self.intervals as f64)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.point(j)).collect()
    }

    fn tol(&self) -> f64 {
        1e-9 * self.top.max(1.0)
    }

    /// Index of the grid point equal to `x` (within 1e-9), if any.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let pos = (x / self.top * self.intervals as f64).round();
        if pos < 0.0 || pos > self.intervals as f64 {
            return None;
        }
        let j = pos as usize;
        ((x - self.point(j)).abs() <= self.tol()).then_some(j)
    }

    /// Largest index with `x_j <= x` (within tolerance).
    pub fn floor_index(&self, x: f64) -> Result<usize> {
        let (i, frac) = self.locate(x)?;
        Ok(if frac >= 1.0 { i + 1 } else { i })
    }

    /// Cell index `i < n` and fraction in `[0, 1]` locating `x` in `[x_i, x_{i+1}]`.
    pub fn locate(&self, x: f64) -> Result<(usize, f64)> {
        if x < -self.tol() || x > self.top + self.tol() || x.is_nan() {
            return Err(Error::Extrapolation {
                level: x,
                top: self.top,
            });
        }
        let pos = (x / self.top * self.intervals as f64).clamp(0.0, self.intervals as f64);
        let i = (pos.floor() as usize).min(self.intervals - 1);
        Ok((i, (pos - i as f64).clamp(0.0, 1.0)))
    }

    /// Piecewise-linear interpolation of grid samples `values` at `x`.
    pub fn interp(&self, values: &[f64], x: f64) -> Result<f64> {
        debug_assert_eq!(values.len(), self.len());
        let (i, frac) = self.locate(x)?;
        Ok(lerp(values[i], values[i + 1], frac))
    }
}

#[inline]
pub(crate) fn lerp(a: f64, b: f64, frac: f64) -> f64 {
    if frac == 0.0 {
        a
    } else if frac == 1.0 {
        b
    } else {
        a + (b - a) * frac
    }
}
