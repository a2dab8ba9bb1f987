//! Parallel sliding-window scan.

use elemtrend_core::window::{analyze_window, enumerate_windows};
use elemtrend_core::{McConfig, PriceSeries, WindowReport, WindowSpec};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Analyzes every window of `prices` on `threads` worker threads (0 picks
/// the number of CPUs).
///
/// Each window is seeded from its own start, so the output is identical
/// for any thread count and matches
/// [`elemtrend_core::window::analyze_series`].
pub fn analyze_series_parallel(
    prices: &PriceSeries,
    spec: &WindowSpec,
    cfg: &McConfig,
    threads: usize,
) -> Result<Vec<WindowReport>> {
    cfg.validate()?;
    let starts = enumerate_windows(prices.len(), spec)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
    pool.install(|| {
        starts
            .par_iter()
            .map(|&start| analyze_window(prices, start, spec, cfg).map_err(Error::from))
            .collect()
    })
}

/// Window counts of a finished scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanSummary {
    pub analyzed: usize,
    pub skipped: usize,
}

impl ScanSummary {
    pub fn of(reports: &[WindowReport]) -> Self {
        let skipped = reports.iter().filter(|r| r.is_skipped()).count();
        ScanSummary {
            analyzed: reports.len() - skipped,
            skipped,
        }
    }

    /// More than half of the windows could not be tested.
    pub fn mostly_degenerate(&self) -> bool {
        2 * self.skipped > self.analyzed + self.skipped
    }
}
