use serde::{Deserialize, Serialize};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub runs: usize,
}

impl Estimate {
    /// Mean and standard error (unbiased variance) of `samples`; the error is
    /// zero for a single sample.
    pub fn from_samples(samples: &[f64]) -> Estimate {
        let n = samples.len();
        assert!(n > 0, "need at least one sample");
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_err = if n < 2 {
            0.0
        } else {
            let ss: f64 = samples.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (n - 1) as f64 / n as f64).sqrt()
        };
        Estimate {
            mean,
            std_err,
            runs: n,
        }
    }
}
