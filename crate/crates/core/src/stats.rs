//! Binomial interval estimates.

use serde::Serialize;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Proportion estimate with a Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProportionEstimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
    pub seed: u64,
}

impl ProportionEstimate {
    pub fn from_counts(hits: u64, samples: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(hits, samples, Z95);
        ProportionEstimate {
            point: hits as f64 / samples as f64,
            ci_low,
            ci_high,
            samples,
            seed,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// Wilson score interval for `hits` successes out of `n`.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    let n_f = n as f64;
    let p = hits as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z / denom * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    (
        (center - half).max(0.0).min(p),
        (center + half).min(1.0).max(p),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference() {
        // Reference values from an independent statistics package.
        let (lo, hi) = wilson_interval(40, 1000, Z95);
        assert!((lo - 0.029_510_973_685_452_76).abs() < 1e-12);
        assert!((hi - 0.054_009_644_121_257_96).abs() < 1e-12);
    }

    #[test]
    fn contains_point_at_extremes() {
        let e = ProportionEstimate::from_counts(0, 10_000, 1);
        assert_eq!(e.ci_low, 0.0);
        assert!(e.ci_high > 0.0);
        let e = ProportionEstimate::from_counts(10_000, 10_000, 1);
        assert_eq!(e.ci_high, 1.0);
    }
}
