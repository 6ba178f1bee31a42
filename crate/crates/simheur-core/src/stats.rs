//! Single-pass sample statistics (Welford accumulation).

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("non-finite sample: {value}")]
pub struct NonFiniteSample {
    pub value: f64,
}

/// Running count, mean, and sum of squared deviations for one solution's
/// simulation replications.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SampleStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl SampleStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Sample mean; 0 when empty.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// Unbiased sample variance `m2 / (n - 1)`; 0 for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        }
    }

    /// Standard error of the mean; 0 for fewer than two samples.
    pub fn std_error(&self) -> f64 {
        if self.n > 1 {
            (self.variance() / self.n as f64).sqrt()
        } else {
            0.0
        }
    }

    /// Accumulate one sample.
    pub fn update(&mut self, sample: f64) -> Result<(), NonFiniteSample> {
        if !sample.is_finite() {
            return Err(NonFiniteSample { value: sample });
        }
        self.n += 1;
        let delta = sample - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (sample - self.mean);
        Ok(())
    }

    /// Combine two accumulations as if their samples had been seen in one
    /// pass (Chan et al. pairwise update).
    pub fn merge(&self, other: &SampleStats) -> SampleStats {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 =
            self.m2 + other.m2 + delta * delta * self.n as f64 * other.n as f64 / n as f64;
        SampleStats { n, mean, m2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn accumulate(samples: &[f64]) -> SampleStats {
        let mut stats = SampleStats::new();
        for &x in samples {
            stats.update(x).unwrap();
        }
        stats
    }

    /// Two-pass oracle for mean and variance.
    fn two_pass(samples: &[f64]) -> (f64, f64) {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        (mean, var)
    }

    #[test]
    fn matches_two_pass_on_known_sequence() {
        let stats = accumulate(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(stats.n(), 8);
        assert!((stats.mean() - 5.0).abs() < 1e-9);
        assert!((stats.variance() - 32.0 / 7.0).abs() < 1e-9);
    }

    #[test]
    fn single_sample() {
        let stats = accumulate(&[3.25]);
        assert_eq!(stats.mean(), 3.25);
        assert_eq!(stats.m2(), 0.0);
        assert_eq!(stats.variance(), 0.0);
    }

    #[test]
    fn constant_sequence_has_zero_variance() {
        let stats = accumulate(&[7.5; 100]);
        assert_eq!(stats.mean(), 7.5);
        assert_eq!(stats.variance(), 0.0);
    }

    #[test]
    fn rejects_non_finite() {
        let mut stats = SampleStats::new();
        assert!(stats.update(f64::NAN).is_err());
        assert!(stats.update(f64::INFINITY).is_err());
        assert_eq!(stats.n(), 0);
    }

    proptest! {
        #[test]
        fn update_matches_two_pass(samples in proptest::collection::vec(-1e6f64..1e6, 1..200)) {
            let stats = accumulate(&samples);
            let (mean, var) = two_pass(&samples);
            prop_assert!((stats.mean() - mean).abs() <= 1e-9 * (1.0 + mean.abs()));
            prop_assert!((stats.variance() - var).abs() <= 1e-9 * (1.0 + var.abs()));
        }

        #[test]
        fn merge_equals_sequential(
            samples in proptest::collection::vec(-1e6f64..1e6, 2..200),
            split in 0usize..200,
        ) {
            let split = split % samples.len();
            let merged = accumulate(&samples[..split]).merge(&accumulate(&samples[split..]));
            let sequential = accumulate(&samples);
            prop_assert!((merged.mean() - sequential.mean()).abs()
                <= 1e-9 * (1.0 + sequential.mean().abs()));
            prop_assert!((merged.variance() - sequential.variance()).abs()
                <= 1e-9 * (1.0 + sequential.variance().abs()));
            prop_assert_eq!(merged.n(), sequential.n());
        }

        #[test]
        fn merge_is_symmetric(
            left in proptest::collection::vec(-1e3f64..1e3, 0..50),
            right in proptest::collection::vec(-1e3f64..1e3, 0..50),
        ) {
            let a = accumulate(&left).merge(&accumulate(&right));
            let b = accumulate(&right).merge(&accumulate(&left));
            prop_assert!((a.mean() - b.mean()).abs() <= 1e-9 * (1.0 + a.mean().abs()));
            prop_assert!((a.m2() - b.m2()).abs() <= 1e-9 * (1.0 + a.m2().abs()));
        }
    }
}
