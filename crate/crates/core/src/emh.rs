//! Log-normal geometric random walk under the no-arbitrage drift
//! constraint, and the probability of a down move it implies.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::series::PriceSeries;

/// Location of the log-step that makes `E[Q] = 1 + r_f`:
/// `ln(1 + r_f) - sigma^2 / 2`.
pub fn mu_from(r_f: f64, sigma: f64) -> f64 {
    libm::log1p(r_f) - 0.5 * sigma * sigma
}

/// `P(Q <= u)` for a log-normal `Q` with log-location `mu` and log-scale `sigma`.
pub fn lognormal_cdf(u: f64, mu: f64, sigma: f64) -> Result<f64> {
    if u.is_nan() || u < 0.0 {
        return Err(Error::Domain(format!("log-normal cdf at {u}")));
    }
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!("log-normal sigma {sigma} must be positive")));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let z = (libm::log(u) - mu) / (sigma * SQRT_2);
    Ok(0.5 * libm::erfc(-z))
}

/// Probability that one step of the walk does not increase the price,
/// `P(Q <= 1)`, with the drift tied to `r_f` by [`mu_from`].
///
/// Equals 1/2 exactly when `r_f = exp(sigma^2 / 2) - 1`.
pub fn down_probability(r_f: f64, sigma: f64) -> f64 {
    let z = sigma / (2.0 * SQRT_2) - libm::log1p(r_f) / (sigma * SQRT_2);
    0.5 * libm::erfc(-z)
}

/// Parameters of a log-normal geometric random walk with daily steps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrwParams {
    pub s0: f64,
    pub sigma: f64,
    pub r_f: f64,
    pub t_max: usize,
}

impl GrwParams {
    pub fn new(s0: f64, sigma: f64, r_f: f64, t_max: usize) -> Result<Self> {
        let p = GrwParams {
            s0,
            sigma,
            r_f,
            t_max,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = String::new();
        if !(self.s0.is_finite() && self.s0 > 0.0) {
            bad = format!("s0 = {}", self.s0);
        } else if !(self.sigma.is_finite() && self.sigma > 0.0) {
            bad = format!("sigma = {}", self.sigma);
        } else if !(self.r_f.is_finite() && self.r_f >= 0.0) {
            bad = format!("r_f = {}", self.r_f);
        } else if self.t_max == 0 {
            bad = "t_max = 0".into();
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid walk parameter {bad}")))
        }
    }

    pub fn mu(&self) -> f64 {
        mu_from(self.r_f, self.sigma)
    }
}

/// The `t_max` log step factors `ln Q_i`, reproducible for a given seed.
pub fn log_steps(params: &GrwParams, rng_seed: u64) -> Result<Vec<f64>> {
    params.validate()?;
    let normal = Normal::new(params.mu(), params.sigma)
        .map_err(|e| Error::Domain(format!("normal law: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    Ok((0..params.t_max).map(|_| normal.sample(&mut rng)).collect())
}

/// Simulates `S(t) = s0 * prod_{i <= t} Q_i` for `t = 0..=t_max`.
///
/// The series is labelled by trading-day ordinals.
pub fn simulate_grw(params: &GrwParams, rng_seed: u64) -> Result<PriceSeries> {
    let steps = log_steps(params, rng_seed)?;
    let log_s0 = libm::log(params.s0);
    let mut log_s = 0.0;
    let mut values = Vec::with_capacity(steps.len() + 1);
    values.push(params.s0);
    for step in steps {
        log_s += step;
        values.push(libm::exp(log_s0 + log_s));
    }
    PriceSeries::from_values("GRW", values)
}
