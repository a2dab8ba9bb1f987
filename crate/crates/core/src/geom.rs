//! Geometric law of trend durations under independent daily signs.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::trends::{Direction, SignSeries};

/// Geometric distribution on `0, 1, 2, ...` with continuation probability
/// `theta`: `P(k) = (1 - theta) * theta^k`.
///
/// For up-trend durations `theta` is the probability of an up move, for
/// down-trend durations the probability of a non-increase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricModel {
    theta: f64,
}

impl GeometricModel {
    pub fn new(theta: f64) -> Result<Self> {
        if theta > 0.0 && theta < 1.0 {
            Ok(GeometricModel { theta })
        } else {
            Err(Error::Degenerate(format!(
                "geometric parameter {theta} outside (0, 1)"
            )))
        }
    }

    pub fn theta(self) -> f64 {
        self.theta
    }

    pub fn pmf(self, k: u64) -> f64 {
        (1.0 - self.theta) * powu(self.theta, k)
    }

    pub fn cdf(self, k: u64) -> f64 {
        1.0 - powu(self.theta, k.saturating_add(1))
    }

    /// `P(N >= k)`.
    pub fn survival(self, k: u64) -> f64 {
        powu(self.theta, k)
    }

    pub fn mean(self) -> f64 {
        self.theta / (1.0 - self.theta)
    }

    /// One draw by inversion: `floor(ln U / ln theta)` with `U` in `(0, 1]`.
    #[inline]
    pub fn draw(self, rng: &mut impl Rng) -> u64 {
        let u = 1.0 - rng.random::<f64>();
        let k = libm::floor(libm::log(u) / libm::log(self.theta));
        if k >= u64::MAX as f64 {
            u64::MAX
        } else {
            k as u64
        }
    }

    /// `n` independent draws, reproducible for a given seed.
    pub fn sample(self, n: usize, rng_seed: u64) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }
}

fn powu(base: f64, exp: u64) -> f64 {
    match i32::try_from(exp) {
        Ok(e) => libm::pow(base, e as f64),
        Err(_) => libm::pow(base, exp as f64),
    }
}

/// Continuation probability estimated as the share of `direction` moves
/// among all changes.
pub fn estimate_theta_from_signs(signs: &SignSeries, direction: Direction) -> Result<GeometricModel> {
    estimate_theta(signs.count(direction), signs.len())
}

pub(crate) fn estimate_theta(hits: usize, total: usize) -> Result<GeometricModel> {
    if total == 0 {
        return Err(Error::Size { needed: 1, got: 0 });
    }
    if hits == 0 || hits == total {
        return Err(Error::Degenerate(format!(
            "{hits} of {total} changes in one direction"
        )));
    }
    GeometricModel::new(hits as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_and_cdf_values() {
        let half = GeometricModel::new(0.5).unwrap();
        assert_eq!(half.pmf(0), 0.5);
        assert_eq!(half.cdf(0), 0.5);
        assert!((GeometricModel::new(0.518).unwrap().pmf(1) - 0.249_676).abs() < 1e-15);
        assert!((GeometricModel::new(0.482).unwrap().cdf(2) - 0.888_019_832).abs() < 1e-12);
        assert!((half.cdf(10_000) - 1.0).abs() < 1e-300);
    }

    #[test]
    fn partial_sums_normalize() {
        let m = GeometricModel::new(0.9).unwrap();
        let total: f64 = (0..=1000).map(|k| m.pmf(k)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_boundary_theta() {
        for t in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(GeometricModel::new(t).is_err());
        }
    }

    #[test]
    fn estimate_from_counts() {
        let mut s = alloc::vec![Direction::Up; 518];
        s.extend(core::iter::repeat_n(Direction::Down, 482));
        let s = SignSeries::from_directions(s);
        assert_eq!(estimate_theta_from_signs(&s, Direction::Up).unwrap().theta(), 0.518);
        assert_eq!(estimate_theta_from_signs(&s, Direction::Down).unwrap().theta(), 0.482);
        let s: SignSeries = "+-".parse().unwrap();
        assert_eq!(estimate_theta_from_signs(&s, Direction::Up).unwrap().theta(), 0.5);
        let s: SignSeries = "+++".parse().unwrap();
        assert!(estimate_theta_from_signs(&s, Direction::Up).is_err());
        assert!(estimate_theta_from_signs(&s, Direction::Down).is_err());
    }

    #[test]
    fn tiny_theta_draws_zero() {
        let m = GeometricModel::new(1e-12).unwrap();
        assert!(m.sample(10_000, 3).iter().all(|&k| k == 0));
    }

    #[test]
    fn sample_is_deterministic() {
        let m = GeometricModel::new(0.3).unwrap();
        assert_eq!(m.sample(100, 9), m.sample(100, 9));
        assert_ne!(m.sample(100, 9), m.sample(100, 10));
    }
}
