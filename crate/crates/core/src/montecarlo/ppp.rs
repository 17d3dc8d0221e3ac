use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::batch_rng;

/// A planar position in polar form around the user at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub r: f64,
    pub theta: f64,
}

impl Point {
    pub fn xy(&self) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (self.r * c, self.r * s)
    }
}

/// An annulus `inner ≤ |p| < outer` centred on the user; `inner = 0` is a disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub inner: f64,
    pub outer: f64,
}

impl Region {
    pub fn disk(radius: f64) -> Self {
        Region { inner: 0.0, outer: radius }
    }

    pub fn annulus(inner: f64, outer: f64) -> Self {
        Region { inner, outer }
    }

    pub fn area(&self) -> f64 {
        PI * (self.outer * self.outer - self.inner * self.inner)
    }

    pub fn validate(&self) -> Result<()> {
        if self.inner >= 0.0 && self.outer > self.inner && self.outer.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!("invalid region [{}, {})", self.inner, self.outer)))
        }
    }

    /// Uniform point from two uniform variates (radius by inverse CDF).
    pub fn point(&self, u: f64, v: f64) -> Point {
        let r2 = self.inner * self.inner + (self.outer * self.outer - self.inner * self.inner) * u;
        Point {
            r: r2.sqrt(),
            theta: 2.0 * PI * v,
        }
    }
}

/// Poisson-distributed count with the given mean (0 when the mean is 0).
pub(crate) fn poisson_count<R: Rng>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive finite mean").sample(rng) as usize
}

/// Homogeneous PPP of `density` points per m² restricted to `region`.
pub fn sample_ppp_with<R: Rng>(density: f64, region: Region, rng: &mut R) -> Vec<Point> {
    let n = poisson_count(density * region.area(), rng);
    (0..n)
        .map(|_| region.point(rng.random(), rng.random()))
        .collect()
}

/// [`sample_ppp_with`] on a fresh seeded stream.
pub fn sample_ppp(density: f64, region: Region, seed: u64) -> Result<Vec<Point>> {
    if !(density >= 0.0) || !density.is_finite() {
        return Err(Error::domain(format!("density must be non-negative, got {density}")));
    }
    region.validate()?;
    Ok(sample_ppp_with(density, region, &mut batch_rng(seed, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_density_is_empty() {
        assert!(sample_ppp(0.0, Region::disk(1000.0), 3).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(sample_ppp(-1.0, Region::disk(10.0), 0).is_err());
        assert!(sample_ppp(1.0, Region::annulus(10.0, 5.0), 0).is_err());
    }

    #[test]
    fn mean_count_matches_intensity() {
        // λ·area = 1/(100²π) · π·1000² = 100
        let density = 1.0 / (100.0 * 100.0 * PI);
        let region = Region::disk(1000.0);
        let mut rng = batch_rng(11, 0);
        let draws = 10_000;
        let total: usize = (0..draws).map(|_| sample_ppp_with(density, region, &mut rng).len()).sum();
        let mean = total as f64 / draws as f64;
        // Poisson: σ_mean = sqrt(100 / 10⁴) = 0.1
        assert!((mean - 100.0).abs() < 3.0 * 0.1, "{mean}");
    }

    #[test]
    fn annulus_radius_squared_is_uniform() {
        let region = Region::annulus(50.0, 100.0);
        let mut rng = batch_rng(5, 0);
        let n = 10_000;
        let mut u: Vec<f64> = (0..n)
            .map(|_| {
                let p = region.point(rng.random(), rng.random());
                assert!(p.r >= 50.0 && p.r < 100.0);
                (p.r * p.r - 2500.0) / 7500.0
            })
            .collect();
        u.sort_by(f64::total_cmp);
        let ks = u
            .iter()
            .enumerate()
            .map(|(i, &x)| ((i + 1) as f64 / n as f64 - x).max(x - i as f64 / n as f64))
            .fold(0.0, f64::max);
        // 1% critical value of the one-sample KS statistic: 1.628/√n
        assert!(ks < 1.628 / (n as f64).sqrt(), "KS = {ks}");
    }
}
