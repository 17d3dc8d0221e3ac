//! Sample statistics and deterministic random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Samples per work batch. Batches are the unit of parallelism; each draws
/// from its own ChaCha stream, so results do not depend on the worker count.
pub const BATCH: usize = 4096;

/// RNG for batch `stream` of a run seeded with `seed`.
pub fn batch_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Splits `n` samples into `(batch index, batch length)` pairs.
pub fn batches(n: usize) -> impl Iterator<Item = (u64, usize)> + Clone {
    (0..n.div_ceil(BATCH)).map(move |i| (i as u64, BATCH.min(n - i * BATCH)))
}

/// A Monte-Carlo point estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl Estimate {
    /// Whether `value` lies within `k` combined standard errors (plus an
    /// optional independent error `other_se`) of this estimate.
    pub fn agrees_with(&self, value: f64, other_se: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error.hypot(other_se)
    }
}

/// Running sums for a mean and its standard error, mergeable across batches.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    pub n: usize,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(mut self, other: Moments) -> Moments {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }

    pub fn estimate(&self, seed: u64) -> Estimate {
        Estimate {
            mean: self.mean(),
            std_error: self.std_error(),
            n_samples: self.n,
            seed,
        }
    }
}

/// Joint sums for a ratio-of-means estimator `E[num] / E[den]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RatioMoments {
    pub num: Moments,
    pub den: Moments,
    pub cross: f64,
}

impl RatioMoments {
    pub fn push(&mut self, num: f64, den: f64) {
        self.num.push(num);
        self.den.push(den);
        self.cross += num * den;
    }

    pub fn merge(self, other: RatioMoments) -> RatioMoments {
        RatioMoments {
            num: self.num.merge(other.num),
            den: self.den.merge(other.den),
            cross: self.cross + other.cross,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.num.sum / self.den.sum
    }

    /// Delta-method standard error of the ratio.
    pub fn std_error(&self) -> f64 {
        let n = self.num.n as f64;
        if n < 2.0 || self.den.sum == 0.0 {
            return 0.0;
        }
        let r = self.ratio();
        let mx = self.den.mean();
        let cov = (self.cross - self.num.sum * self.den.sum / n) / (n - 1.0);
        let var = self.num.variance() - 2.0 * r * cov + r * r * self.den.variance();
        (var.max(0.0) / n).sqrt() / mx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn batches_cover_exactly() {
        let n = 3 * BATCH + 17;
        let v: Vec<_> = batches(n).collect();
        assert_eq!(v.len(), 4);
        assert_eq!(v.iter().map(|b| b.1).sum::<usize>(), n);
        assert_eq!(batches(0).count(), 0);
    }

    #[test]
    fn streams_are_distinct_and_repeatable() {
        let a: u64 = batch_rng(7, 0).random();
        let b: u64 = batch_rng(7, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, batch_rng(7, 0).random::<u64>());
    }

    #[test]
    fn moments() {
        let mut m = Moments::default();
        for x in [1.0, 2.0, 3.0, 4.0] {
            m.push(x);
        }
        assert_eq!(m.mean(), 2.5);
        assert!((m.variance() - 5.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn ratio_of_constant_multiple_has_no_error() {
        let mut r = RatioMoments::default();
        for x in [1.0, 2.0, 5.0] {
            r.push(3.0 * x, x);
        }
        assert!((r.ratio() - 3.0).abs() < 1e-15);
        assert!(r.std_error() < 1e-7);
    }
}
