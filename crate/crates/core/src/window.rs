//! Sliding-window scan: per-window waiting-time tests and the share of up
//! moves.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gof::{ad_test_signs, AdTestResult, McConfig};
use crate::seed;
use crate::series::{DateKey, PriceSeries};
use crate::trends::{Direction, SignSeries, WaitingTimeSample};

/// Window length in prices and the shift between consecutive windows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    pub length: usize,
    pub step: usize,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            length: 1000,
            step: 1,
        }
    }
}

impl WindowSpec {
    pub fn validate(&self) -> Result<()> {
        if self.length < 100 {
            return Err(Error::Domain(format!(
                "window length {} is below 100",
                self.length
            )));
        }
        if self.step == 0 {
            return Err(Error::Domain("window step must be positive".into()));
        }
        Ok(())
    }

    /// Number of windows fitting in `series_len` prices.
    pub fn count(&self, series_len: usize) -> usize {
        if series_len < self.length {
            0
        } else {
            (series_len - self.length) / self.step + 1
        }
    }
}

/// Start ordinals `0, step, 2 step, ...` of every window that fits.
pub fn enumerate_windows(series_len: usize, spec: &WindowSpec) -> Result<Vec<usize>> {
    spec.validate()?;
    if series_len < spec.length {
        return Err(Error::Size {
            needed: spec.length,
            got: series_len,
        });
    }
    Ok((0..spec.count(series_len)).map(|i| i * spec.step).collect())
}

/// Share of up moves among the `length - 1` changes of each window,
/// labelled by the window's first date.
pub fn up_ratio_series(prices: &PriceSeries, spec: &WindowSpec) -> Result<Vec<(DateKey, f64)>> {
    let starts = enumerate_windows(prices.len(), spec)?;
    let signs = SignSeries::from_values(prices.values())?;
    // ups[i] = number of up moves among the first i changes
    let mut ups = Vec::with_capacity(signs.len() + 1);
    ups.push(0usize);
    for &d in signs.as_slice() {
        ups.push(ups.last().unwrap() + (d == Direction::Up) as usize);
    }
    let changes = spec.length - 1;
    Ok(starts
        .into_iter()
        .map(|s| {
            let n_up = ups[s + changes] - ups[s];
            (prices.dates()[s], n_up as f64 / changes as f64)
        })
        .collect())
}

/// Test of one direction within a window.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionTest {
    pub result: AdTestResult,
    pub histogram: WaitingTimeSample,
}

#[derive(Clone, Debug, PartialEq)]
pub enum WindowOutcome {
    Tested { up: DirectionTest, down: DirectionTest },
    /// The window cannot support the test; the error says why.
    Skipped(Error),
}

/// Analysis of one window.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowReport {
    pub start: usize,
    pub start_date: DateKey,
    pub up_ratio: f64,
    pub outcome: WindowOutcome,
}

impl WindowReport {
    pub fn is_skipped(&self) -> bool {
        matches!(self.outcome, WindowOutcome::Skipped(_))
    }

    pub fn test(&self, direction: Direction) -> Option<&DirectionTest> {
        match &self.outcome {
            WindowOutcome::Tested { up, down } => Some(match direction {
                Direction::Up => up,
                Direction::Down => down,
            }),
            WindowOutcome::Skipped(_) => None,
        }
    }
}

/// Seed for one direction of the window starting at `start`.
pub fn window_seed(master_seed: u64, start: usize, direction: Direction) -> u64 {
    seed::derive(master_seed, &[start as u64, direction.tag()])
}

/// Tests both directions of the window starting at ordinal `start`.
///
/// Windows that cannot support the test come back as
/// [`WindowOutcome::Skipped`]; only invalid arguments are errors.
pub fn analyze_window(
    prices: &PriceSeries,
    start: usize,
    spec: &WindowSpec,
    cfg: &McConfig,
) -> Result<WindowReport> {
    spec.validate()?;
    cfg.validate()?;
    let end = start
        .checked_add(spec.length)
        .filter(|&e| e <= prices.len())
        .ok_or_else(|| {
            Error::Range(format!(
                "window [{start}, {start} + {}) exceeds series of {}",
                spec.length,
                prices.len()
            ))
        })?;
    let signs = SignSeries::from_values(&prices.values()[start..end])?;
    let up_ratio = signs.n_up() as f64 / signs.len() as f64;
    let run = |direction| {
        let cfg = McConfig {
            master_seed: window_seed(cfg.master_seed, start, direction),
            ..*cfg
        };
        ad_test_signs(&signs, direction, &cfg)
            .map(|(result, histogram)| DirectionTest { result, histogram })
    };
    let outcome = match run(Direction::Up).and_then(|up| Ok((up, run(Direction::Down)?))) {
        Ok((up, down)) => WindowOutcome::Tested { up, down },
        Err(e) => WindowOutcome::Skipped(e),
    };
    Ok(WindowReport {
        start,
        start_date: prices.dates()[start],
        up_ratio,
        outcome,
    })
}

/// Analyzes every window in order.
pub fn analyze_series(
    prices: &PriceSeries,
    spec: &WindowSpec,
    cfg: &McConfig,
) -> Result<Vec<WindowReport>> {
    cfg.validate()?;
    enumerate_windows(prices.len(), spec)?
        .into_iter()
        .map(|start| analyze_window(prices, start, spec, cfg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn window_counts() {
        let spec = WindowSpec::default();
        assert_eq!(enumerate_windows(1000, &spec).unwrap(), vec![0]);
        assert_eq!(enumerate_windows(21_784, &spec).unwrap().len(), 20_785);
        let spec = WindowSpec {
            length: 1000,
            step: 2,
        };
        assert_eq!(enumerate_windows(1004, &spec).unwrap(), vec![0, 2, 4]);
        assert!(enumerate_windows(999, &WindowSpec::default()).is_err());
        assert!(WindowSpec { length: 99, step: 1 }.validate().is_err());
        assert!(WindowSpec { length: 100, step: 0 }.validate().is_err());
    }

    #[test]
    fn ratio_of_monotone_and_alternating() {
        let spec = WindowSpec {
            length: 101,
            step: 1,
        };
        let up = PriceSeries::from_values("up", (1..=150).map(f64::from).collect()).unwrap();
        assert!(up_ratio_series(&up, &spec).unwrap().iter().all(|&(_, r)| r == 1.0));
        let alt = PriceSeries::from_values(
            "alt",
            (0..150).map(|i| if i % 2 == 0 { 10.0 } else { 11.0 }).collect(),
        )
        .unwrap();
        let ratios = up_ratio_series(&alt, &spec).unwrap();
        assert_eq!(ratios.len(), 50);
        assert!(ratios.iter().all(|&(_, r)| r == 0.5));
        assert_eq!(ratios[3].0, DateKey::Ordinal(3));
    }

    #[test]
    fn monotone_window_is_skipped() {
        let spec = WindowSpec {
            length: 200,
            step: 1,
        };
        let up = PriceSeries::from_values("up", (1..=200).map(f64::from).collect()).unwrap();
        let cfg = McConfig {
            m_replicates: 99,
            ..McConfig::new(3)
        };
        let r = analyze_window(&up, 0, &spec, &cfg).unwrap();
        assert!(r.is_skipped());
        assert_eq!(r.up_ratio, 1.0);
        assert!(analyze_window(&up, 1, &spec, &cfg).is_err());
    }
}
