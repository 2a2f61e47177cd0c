//! Seeded randomness shared by every solver.
//!
//! The generator is ChaCha8 seeded from a `u64` via `SeedableRng::seed_from_u64`,
//! whose output stream is specified independently of the host platform.
//! Component indices come from `random_range` over `0..n` (uniform, with
//! replacement). Standard-normal coordinates come from the ziggurat sampler
//! of `rand_distr::StandardNormal`; the crate versions are pinned by
//! `Cargo.lock`, which fixes the transform for a release.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::point::Point;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform component index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n >= 1, "cannot draw an index from an empty range");
        self.inner.random_range(0..n)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform draw in `[low, high)`.
    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.inner.random::<f64>()
    }

    /// A vector of `d` independent standard-normal coordinates.
    pub fn gaussian(&mut self, d: usize) -> Point {
        assert!(d >= 1, "dimension must be at least 1");
        Point::from_raw((0..d).map(|_| self.standard_normal()).collect())
    }

    /// Derives an independent stream, e.g. for per-seed replicas.
    pub fn fork(&mut self) -> RngStream {
        RngStream::new(self.inner.random())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let mut a = RngStream::new(42);
        let mut b = RngStream::new(42);
        let a1 = a.gaussian(5);
        let a2 = a.gaussian(5);
        assert_ne!(a1, a2);
        assert_eq!(a1, b.gaussian(5));
        assert_eq!(a2, b.gaussian(5));
        assert_eq!(a.index(17), b.index(17));
    }

    #[test]
    fn gaussian_moments() {
        let draws = 100_000usize;
        let d = 3;
        let mut rng = RngStream::new(7);
        let mut sum = vec![0.0; d];
        let mut sum_sq = vec![0.0; d];
        for _ in 0..draws {
            let u = rng.gaussian(d);
            for j in 0..d {
                sum[j] += u[j];
                sum_sq[j] += u[j] * u[j];
            }
        }
        let bound = 4.0 / (draws as f64).sqrt();
        for j in 0..d {
            let mean = sum[j] / draws as f64;
            let var = sum_sq[j] / draws as f64 - mean * mean;
            assert!(mean.abs() < bound, "mean {mean} outside {bound}");
            assert!((0.95..=1.05).contains(&var), "variance {var}");
        }
    }

    #[test]
    fn indices_cover_range() {
        let mut rng = RngStream::new(1);
        let mut seen = [false; 4];
        for _ in 0..200 {
            seen[rng.index(4)] = true;
        }
        assert!(seen.iter().all(|s| *s));
    }
}
