//! Discrete Anderson-Darling test of waiting times against the geometric
//! law, with parametric-bootstrap π-values.
//!
//! Cells are consecutive integer ranges `[a_j, a_{j+1})`, the last one open.
//! With observed cumulative counts `S_j`, null cumulative probabilities
//! `H_j` and `Z_j = S_j - n H_j`,
//!
//! ```text
//! A² = (1/n) Σ_{j<m} Z_j² p_j / (H_j (1 - H_j))
//! ```
//!
//! The last cell is left out since `Z_m = 0`. The reference distribution
//! of `A²` is obtained by rerunning the whole sampling pipeline on
//! simulated Bernoulli sign series, so the statistic is calibrated against
//! the same estimator, draw scheme and censoring policy as the data.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{estimate_theta, GeometricModel};
use crate::seed;
use crate::trends::{CensorPolicy, Direction, SignSeries, WaitingTable, WaitingTimeSample};

/// Partition of the durations into consecutive cells with their null
/// probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct CellPartition {
    /// Lower bound of each cell. The last cell is unbounded above.
    starts: Vec<u64>,
    null_probs: Vec<f64>,
    /// `H_j`, null probability of cells `0..=j`.
    cumulative: Vec<f64>,
    /// `1 - H_j`, computed directly.
    upper: Vec<f64>,
}

impl CellPartition {
    /// Cells starting at `starts` (strictly increasing, first entry 0, at
    /// least three cells) with probabilities under `model`.
    pub fn with_starts(model: GeometricModel, starts: Vec<u64>) -> Result<Self> {
        if starts.len() < 3 {
            return Err(Error::Partition(format!(
                "need at least 3 cells, got {}",
                starts.len()
            )));
        }
        if starts[0] != 0 || starts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Partition(
                "cell starts must begin at 0 and increase strictly".into(),
            ));
        }
        let ln_theta = libm::log(model.theta());
        let m = starts.len();
        let mut null_probs = Vec::with_capacity(m);
        let mut cumulative = Vec::with_capacity(m);
        let mut upper = Vec::with_capacity(m);
        let mut acc = 0.0;
        for j in 0..m {
            let lo = starts[j];
            let p = match starts.get(j + 1) {
                // theta^lo * (1 - theta^(hi - lo))
                Some(&hi) => model.survival(lo) * -libm::expm1((hi - lo) as f64 * ln_theta),
                None => model.survival(lo),
            };
            acc += p;
            null_probs.push(p);
            cumulative.push(acc);
            upper.push(starts.get(j + 1).map_or(0.0, |&hi| model.survival(hi)));
        }
        Ok(CellPartition {
            starts,
            null_probs,
            cumulative,
            upper,
        })
    }

    pub fn starts(&self) -> &[u64] {
        &self.starts
    }

    pub fn null_probs(&self) -> &[f64] {
        &self.null_probs
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    /// Start of the open tail cell.
    pub fn tail_start(&self) -> u64 {
        *self.starts.last().expect("at least 3 cells")
    }

    /// Index of the cell holding duration `k`.
    pub fn cell_of(&self, k: u64) -> usize {
        self.starts.partition_point(|&s| s <= k) - 1
    }

    /// Per-cell counts of a histogram indexed by duration.
    pub fn bin(&self, counts: &[u64]) -> Vec<u64> {
        let mut cells = vec![0u64; self.len()];
        for (k, &c) in counts.iter().enumerate() {
            if c > 0 {
                cells[self.cell_of(k as u64)] += c;
            }
        }
        cells
    }
}

/// Singleton cells `{0}, {1}, ..., {K-1}` and a tail `{>= K}`, where `K` is
/// the largest value whose tail still expects at least `min_expected`
/// observations out of `n`.
pub fn build_cells(model: GeometricModel, n: usize, min_expected: f64) -> Result<CellPartition> {
    if n < 30 {
        return Err(Error::Size { needed: 30, got: n });
    }
    if !(min_expected > 0.0) {
        return Err(Error::Domain(format!("min_expected {min_expected} must be positive")));
    }
    let n = n as f64;
    // largest K with n * theta^K >= min_expected
    let mut k = libm::floor(libm::log(min_expected / n) / libm::log(model.theta()));
    if k < 0.0 {
        k = -1.0;
    }
    let mut k = k as i64;
    while k >= 0 && n * model.survival(k as u64) < min_expected {
        k -= 1;
    }
    while n * model.survival(k as u64 + 1) >= min_expected {
        k += 1;
    }
    if k < 2 {
        return Err(Error::Degenerate(format!(
            "theta = {} leaves fewer than 3 cells with expected count >= {min_expected} at n = {n}",
            model.theta()
        )));
    }
    CellPartition::with_starts(model, (0..=k as u64).collect())
}

/// Anderson-Darling statistic from per-cell observed counts.
pub fn ad_statistic_cells(cell_counts: &[u64], cells: &CellPartition) -> Result<f64> {
    if cell_counts.len() != cells.len() {
        return Err(Error::Partition(format!(
            "{} cell counts for {} cells",
            cell_counts.len(),
            cells.len()
        )));
    }
    let n: u64 = cell_counts.iter().sum();
    if n == 0 {
        return Err(Error::Size { needed: 1, got: 0 });
    }
    let nf = n as f64;
    let mut observed = 0u64;
    let mut sum = 0.0;
    for j in 0..cells.len() - 1 {
        observed += cell_counts[j];
        let h = cells.cumulative[j];
        let z = observed as f64 - nf * h;
        sum += z * z * cells.null_probs[j] / (h * cells.upper[j]);
    }
    Ok(sum / nf)
}

/// Anderson-Darling statistic of a waiting-time histogram.
pub fn ad_statistic(sample: &WaitingTimeSample, cells: &CellPartition) -> Result<f64> {
    ad_statistic_cells(&cells.bin(sample.counts()), cells)
}

/// Bootstrap settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McConfig {
    pub m_replicates: usize,
    pub n_points: usize,
    pub min_expected: f64,
    pub master_seed: u64,
    pub censor: CensorPolicy,
}

impl McConfig {
    pub fn new(master_seed: u64) -> Self {
        McConfig {
            m_replicates: 999,
            n_points: 500,
            min_expected: 5.0,
            master_seed,
            censor: CensorPolicy::Discard,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 50 {
            return Err(Error::Domain(format!("n_points = {} is below 50", self.n_points)));
        }
        self.validate_replicates()
    }

    /// Checks everything except `n_points`, which plain duration tests ignore.
    fn validate_replicates(&self) -> Result<()> {
        if self.m_replicates < 99 {
            return Err(Error::Domain(format!(
                "m_replicates = {} is below 99",
                self.m_replicates
            )));
        }
        if !(self.min_expected > 0.0) {
            return Err(Error::Domain(format!(
                "min_expected = {} must be positive",
                self.min_expected
            )));
        }
        Ok(())
    }

    fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }
}

/// Outcome of one Anderson-Darling test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdTestResult {
    pub direction: Direction,
    pub a2: f64,
    pub pi_value: f64,
    pub n: usize,
    pub theta_hat: f64,
    /// Non-degenerate replicates the π-value is based on.
    pub m_replicates: usize,
    pub seed: u64,
}

/// Allowed share of degenerate replicates before calibration fails.
const MAX_DEGENERATE: f64 = 0.05;

const TAG_SAMPLE: u64 = 0;
const TAG_REPLICATE: u64 = 1;

struct Tally {
    exceed: usize,
    valid: usize,
    degenerate: usize,
}

impl Tally {
    fn new() -> Self {
        Tally {
            exceed: 0,
            valid: 0,
            degenerate: 0,
        }
    }

    fn record(&mut self, outcome: Result<f64>, observed: f64) -> Result<()> {
        match outcome {
            Ok(a2) => {
                self.valid += 1;
                if a2 >= observed {
                    self.exceed += 1;
                }
                Ok(())
            }
            Err(Error::Degenerate(_)) => {
                self.degenerate += 1;
                Ok(())
            }
            Err(e) => Err(e),
        }
    }

    fn pi_value(&self) -> Result<f64> {
        let total = self.valid + self.degenerate;
        if self.degenerate as f64 > MAX_DEGENERATE * total as f64 || self.valid == 0 {
            return Err(Error::Calibration {
                degenerate: self.degenerate,
                total,
            });
        }
        Ok((1 + self.exceed) as f64 / (self.valid + 1) as f64)
    }
}

/// Bernoulli sign series with `P(up) = up_prob`, written into `buf`.
fn bernoulli_signs(buf: &mut Vec<Direction>, len: usize, up_prob: f64, rng: &mut impl RngCore) {
    // P(u < t) = up_prob for u uniform on 64-bit integers
    let threshold = if up_prob >= 1.0 {
        u64::MAX
    } else {
        (up_prob * 18_446_744_073_709_551_616.0) as u64
    };
    buf.clear();
    buf.extend((0..len).map(|_| {
        if rng.next_u64() < threshold {
            Direction::Up
        } else {
            Direction::Down
        }
    }));
}

fn up_probability(theta: GeometricModel, direction: Direction) -> f64 {
    match direction {
        Direction::Up => theta.theta(),
        Direction::Down => 1.0 - theta.theta(),
    }
}

/// Samples waiting times from `signs`, fits the geometric law from the
/// sign counts and returns `(theta_hat, histogram, A²)`.
fn fit_and_score(
    signs: &[Direction],
    direction: Direction,
    cfg: &McConfig,
    rng: &mut impl Rng,
) -> Result<(GeometricModel, WaitingTimeSample, f64)> {
    let hits = signs.iter().filter(|&&d| d == direction).count();
    let theta = estimate_theta(hits, signs.len())?;
    let sample = WaitingTable::new(signs).sample(direction, cfg.n_points, cfg.censor, rng)?;
    let cells = build_cells(theta, cfg.n_points, cfg.min_expected)?;
    let a2 = ad_statistic(&sample, &cells)?;
    Ok((theta, sample, a2))
}

/// Bootstrap π-value of `observed_a2` for a window of `signs_len` changes
/// whose fitted continuation probability is `theta_hat`.
///
/// Each replicate simulates a Bernoulli sign series, re-estimates the
/// parameter, redraws the waiting-time sample and recomputes `A²` with
/// freshly built cells. Replicate `r` is seeded from
/// `(cfg.master_seed, r)` alone. The estimate is
/// `(1 + #{A²* >= observed}) / (M + 1)`, counting only non-degenerate
/// replicates.
pub fn mc_pi_value(
    signs_len: usize,
    theta_hat: GeometricModel,
    direction: Direction,
    observed_a2: f64,
    cfg: &McConfig,
) -> Result<AdTestResult> {
    cfg.validate()?;
    if signs_len < 100 {
        return Err(Error::Size {
            needed: 100,
            got: signs_len,
        });
    }
    let up_prob = up_probability(theta_hat, direction);
    let mut tally = Tally::new();
    let mut buf = Vec::with_capacity(signs_len);
    for r in 0..cfg.m_replicates {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed::derive(cfg.master_seed, &[TAG_REPLICATE, r as u64]));
        bernoulli_signs(&mut buf, signs_len, up_prob, &mut rng);
        let outcome = fit_and_score(&buf, direction, cfg, &mut rng).map(|(_, _, a2)| a2);
        tally.record(outcome, observed_a2)?;
    }
    Ok(AdTestResult {
        direction,
        a2: observed_a2,
        pi_value: tally.pi_value()?,
        n: cfg.n_points,
        theta_hat: theta_hat.theta(),
        m_replicates: tally.valid,
        seed: cfg.master_seed,
    })
}

/// Full test of one direction of a sign series: sampling, fit, statistic
/// and bootstrap π-value, all seeded from `cfg.master_seed`.
pub fn ad_test_signs(
    signs: &SignSeries,
    direction: Direction,
    cfg: &McConfig,
) -> Result<(AdTestResult, WaitingTimeSample)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(cfg.master_seed, &[TAG_SAMPLE]));
    let (theta, sample, a2) = fit_and_score(signs.as_slice(), direction, cfg, &mut rng)?;
    let result = mc_pi_value(
        signs.len(),
        theta,
        direction,
        a2,
        &cfg.with_seed(seed::derive(cfg.master_seed, &[TAG_REPLICATE])),
    )?;
    Ok((
        AdTestResult {
            seed: cfg.master_seed,
            ..result
        },
        sample,
    ))
}

/// Where the null parameter of a plain duration sample comes from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThetaSource {
    /// Known in advance; replicates reuse it.
    Fixed(GeometricModel),
    /// Estimated from an independent sign series of the given length;
    /// replicates re-estimate it from simulated signs.
    Signs {
        estimate: GeometricModel,
        direction: Direction,
        signs_len: usize,
    },
}

/// Test of an i.i.d. sample of durations against the geometric law.
///
/// Replicates draw `n` i.i.d. geometric durations and score them against
/// cells built for the (possibly re-estimated) parameter.
pub fn ad_test_durations(
    durations: &[u64],
    source: ThetaSource,
    cfg: &McConfig,
) -> Result<AdTestResult> {
    cfg.validate_replicates()?;
    let n = durations.len();
    let (theta_hat, direction) = match source {
        ThetaSource::Fixed(m) => (m, Direction::Up),
        ThetaSource::Signs {
            estimate,
            direction,
            ..
        } => (estimate, direction),
    };
    let score = |draws: &[u64], theta: GeometricModel| -> Result<f64> {
        let cells = build_cells(theta, n, cfg.min_expected)?;
        let mut cell_counts = vec![0u64; cells.len()];
        for &k in draws {
            cell_counts[cells.cell_of(k)] += 1;
        }
        ad_statistic_cells(&cell_counts, &cells)
    };
    let observed = score(durations, theta_hat)?;
    let mut tally = Tally::new();
    let mut draws = vec![0u64; n];
    let mut signs = Vec::new();
    for r in 0..cfg.m_replicates {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed::derive(cfg.master_seed, &[TAG_REPLICATE, r as u64]));
        let refit = match source {
            ThetaSource::Fixed(m) => Ok(m),
            ThetaSource::Signs { signs_len, .. } => {
                bernoulli_signs(&mut signs, signs_len, up_probability(theta_hat, direction), &mut rng);
                let hits = signs.iter().filter(|&&d| d == direction).count();
                estimate_theta(hits, signs_len)
            }
        };
        for d in draws.iter_mut() {
            *d = theta_hat.draw(&mut rng);
        }
        tally.record(refit.and_then(|t| score(&draws, t)), observed)?;
    }
    Ok(AdTestResult {
        direction,
        a2: observed,
        pi_value: tally.pi_value()?,
        n,
        theta_hat: theta_hat.theta(),
        m_replicates: tally.valid,
        seed: cfg.master_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> GeometricModel {
        GeometricModel::new(0.5).unwrap()
    }

    #[test]
    fn cells_for_half_at_500() {
        let cells = build_cells(half(), 500, 5.0).unwrap();
        assert_eq!(cells.starts(), &[0, 1, 2, 3, 4, 5, 6]);
        assert_eq!(cells.tail_start(), 6);
        let total: f64 = cells.null_probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(cells.null_probs()[6], 0.5f64.powi(6));
    }

    #[test]
    fn cells_too_few() {
        let tiny = GeometricModel::new(0.01).unwrap();
        assert!(matches!(build_cells(tiny, 30, 5.0), Err(Error::Degenerate(_))));
        assert!(matches!(build_cells(half(), 29, 5.0), Err(Error::Size { .. })));
    }

    #[test]
    fn hand_computed_statistic() {
        let cells = CellPartition::with_starts(half(), vec![0, 1, 2]).unwrap();
        let a2 = ad_statistic_cells(&[300, 150, 50], &cells).unwrap();
        assert!((a2 - 25.0).abs() < 1e-12);
        let sample = WaitingTimeSample::from_counts(Direction::Up, vec![300, 150, 30, 20]);
        assert!((ad_statistic(&sample, &cells).unwrap() - 25.0).abs() < 1e-12);
    }

    #[test]
    fn exact_fit_scores_zero() {
        let cells = CellPartition::with_starts(half(), vec![0, 1, 2]).unwrap();
        assert_eq!(ad_statistic_cells(&[250, 125, 125], &cells).unwrap(), 0.0);
    }

    #[test]
    fn statistic_is_homogeneous() {
        let cells = CellPartition::with_starts(half(), vec![0, 1, 3, 5]).unwrap();
        let a = ad_statistic_cells(&[40, 30, 20, 10], &cells).unwrap();
        let b = ad_statistic_cells(&[80, 60, 40, 20], &cells).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn partition_validation() {
        assert!(CellPartition::with_starts(half(), vec![0, 1]).is_err());
        assert!(CellPartition::with_starts(half(), vec![1, 2, 3]).is_err());
        assert!(CellPartition::with_starts(half(), vec![0, 2, 2]).is_err());
        let cells = CellPartition::with_starts(half(), vec![0, 1, 2]).unwrap();
        assert!(ad_statistic_cells(&[1, 2], &cells).is_err());
        assert!(ad_statistic_cells(&[0, 0, 0], &cells).is_err());
    }

    #[test]
    fn cell_lookup() {
        let cells = CellPartition::with_starts(half(), vec![0, 2, 5]).unwrap();
        let idx: Vec<_> = (0..8).map(|k| cells.cell_of(k)).collect();
        assert_eq!(idx, [0, 0, 1, 1, 1, 2, 2, 2]);
    }

    #[test]
    fn pi_value_bounds() {
        let cfg = McConfig {
            m_replicates: 99,
            ..McConfig::new(1)
        };
        let zero = mc_pi_value(999, half(), Direction::Up, 0.0, &cfg).unwrap();
        assert_eq!(zero.pi_value, 1.0);
        assert_eq!(zero.m_replicates, 99);
        let inf = mc_pi_value(999, half(), Direction::Up, f64::INFINITY, &cfg).unwrap();
        assert_eq!(inf.pi_value, 1.0 / 100.0);
    }

    #[test]
    fn mc_is_deterministic() {
        let cfg = McConfig {
            m_replicates: 99,
            ..McConfig::new(5)
        };
        let theta = GeometricModel::new(0.47).unwrap();
        let a = mc_pi_value(500, theta, Direction::Down, 1.3, &cfg).unwrap();
        let b = mc_pi_value(500, theta, Direction::Down, 1.3, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_limits() {
        let mut cfg = McConfig::new(0);
        assert!(cfg.validate().is_ok());
        cfg.m_replicates = 98;
        assert!(mc_pi_value(999, half(), Direction::Up, 0.0, &cfg).is_err());
        let cfg = McConfig {
            n_points: 49,
            ..McConfig::new(0)
        };
        assert!(cfg.validate().is_err());
        assert!(mc_pi_value(99, half(), Direction::Up, 0.0, &McConfig::new(0)).is_err());
    }

    #[test]
    fn constant_durations_are_rejected() {
        let cfg = McConfig {
            m_replicates: 199,
            ..McConfig::new(11)
        };
        let r = ad_test_durations(&[7; 60], ThetaSource::Fixed(half()), &cfg).unwrap();
        assert_eq!(r.pi_value, 1.0 / 200.0);
    }

    #[test]
    fn bernoulli_threshold_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut buf = Vec::new();
        bernoulli_signs(&mut buf, 100, 0.0, &mut rng);
        assert!(buf.iter().all(|&d| d == Direction::Down));
        bernoulli_signs(&mut buf, 100, 1.0, &mut rng);
        assert!(buf.iter().all(|&d| d == Direction::Up));
    }
}
