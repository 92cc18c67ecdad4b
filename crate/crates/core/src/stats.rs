//! Binomial summaries for Monte-Carlo rates.

// inherent float methods shadow this when std is linked
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

/// An observed proportion with its Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Proportion {
    /// Wilson interval at `z` standard deviations. Zero trials give a rate of
    /// NaN and the trivial interval `[0, 1]`.
    pub fn new(successes: u64, trials: u64, z: f64) -> Self {
        if trials == 0 {
            return Self {
                successes,
                trials,
                rate: f64::NAN,
                lower: 0.0,
                upper: 1.0,
            };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Self {
            successes,
            trials,
            rate: p,
            lower: (centre - half).max(0.0),
            upper: (centre + half).min(1.0),
        }
    }
}

/// Standard deviation of the mean of `trials` Bernoulli(p) draws.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// `true` when `observed` lies within `k` binomial standard deviations of `p`.
pub fn within_sigmas(observed: f64, p: f64, trials: u64, k: f64) -> bool {
    (observed - p).abs() <= k * binomial_sigma(p, trials)
}
