//! Sign process of daily price changes, elemental trends and randomized
//! waiting-time sampling.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::series::PriceSeries;

/// Direction of one daily price change.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn opposite(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }

    /// A zero change is a non-increase and counts as `Down`.
    pub fn of_change(from: f64, to: f64) -> Self {
        if to > from {
            Direction::Up
        } else {
            Direction::Down
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }

    pub(crate) fn tag(self) -> u64 {
        match self {
            Direction::Up => 1,
            Direction::Down => 2,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "up" | "UP" | "Up" => Ok(Direction::Up),
            "down" | "DOWN" | "Down" => Ok(Direction::Down),
            _ => Err(Error::Data(format!("unknown direction {s:?}"))),
        }
    }
}

/// The sequence of change directions of a price series, one per consecutive
/// pair of prices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignSeries {
    signs: Vec<Direction>,
    n_up: usize,
}

impl SignSeries {
    pub fn from_directions(signs: Vec<Direction>) -> Self {
        let n_up = signs.iter().filter(|&&d| d == Direction::Up).count();
        SignSeries { signs, n_up }
    }

    /// Signs of consecutive changes of `values`.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Size {
                needed: 2,
                got: values.len(),
            });
        }
        Ok(Self::from_directions(
            values
                .windows(2)
                .map(|w| Direction::of_change(w[0], w[1]))
                .collect(),
        ))
    }

    pub fn as_slice(&self) -> &[Direction] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn n_down(&self) -> usize {
        self.signs.len() - self.n_up
    }

    pub fn count(&self, direction: Direction) -> usize {
        match direction {
            Direction::Up => self.n_up(),
            Direction::Down => self.n_down(),
        }
    }
}

impl FromStr for SignSeries {
    type Err = Error;

    /// Parses `+`/`-` notation; whitespace is ignored and `−` (U+2212) is
    /// accepted for `-`.
    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '+' | 'U' | 'u' => Ok(Direction::Up),
                '-' | '\u{2212}' | 'D' | 'd' => Ok(Direction::Down),
                other => Err(Error::Data(format!("invalid sign character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SignSeries::from_directions(signs))
    }
}

impl fmt::Display for SignSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.signs {
            f.write_str(match d {
                Direction::Up => "+",
                Direction::Down => "-",
            })?;
        }
        Ok(())
    }
}

/// Signs of a price series' daily changes.
pub fn signs(prices: &PriceSeries) -> Result<SignSeries> {
    SignSeries::from_values(prices.values())
}

/// An elemental trend: a maximal block of same-direction changes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Run {
    pub direction: Direction,
    /// Ordinal of the first change in the run.
    pub start: usize,
    pub duration: usize,
}

/// Splits a sign series into its maximal same-direction runs.
pub fn runs(signs: &SignSeries) -> Result<Vec<Run>> {
    let s = signs.as_slice();
    let Some(&first) = s.first() else {
        return Err(Error::Size { needed: 1, got: 0 });
    };
    let mut out = Vec::new();
    let mut current = Run {
        direction: first,
        start: 0,
        duration: 0,
    };
    for (i, &d) in s.iter().enumerate() {
        if d == current.direction {
            current.duration += 1;
        } else {
            out.push(current);
            current = Run {
                direction: d,
                start: i,
                duration: 1,
            };
        }
    }
    out.push(current);
    Ok(out)
}

/// Waiting time observed from one sampled day.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WaitingTime {
    pub duration: usize,
    /// The run reached the end of the series, so its true length is unknown.
    pub censored: bool,
}

/// Number of consecutive `direction` changes starting at 1-based position
/// `position`, counting the position itself, before the first reversal or
/// the end of the series.
///
/// Returns 0 when the change at `position` goes the other way.
pub fn waiting_time_at(
    signs: &SignSeries,
    position: usize,
    direction: Direction,
) -> Result<WaitingTime> {
    let s = signs.as_slice();
    if position == 0 || position > s.len() {
        return Err(Error::Range(format!(
            "position {position} outside 1..={}",
            s.len()
        )));
    }
    let tail = &s[position - 1..];
    let duration = tail.iter().take_while(|&&d| d == direction).count();
    Ok(WaitingTime {
        duration,
        censored: duration == tail.len(),
    })
}

/// How draws whose run is cut by the end of the window are handled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CensorPolicy {
    /// Discard and redraw until an uncensored position is drawn.
    #[default]
    Discard,
    /// Record the truncated duration.
    KeepTruncated,
}

/// Histogram of waiting times for one direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaitingTimeSample {
    pub direction: Direction,
    /// `counts[k]` is the number of draws with waiting time `k`.
    counts: Vec<u64>,
    n: u64,
}

impl WaitingTimeSample {
    pub fn from_counts(direction: Direction, mut counts: Vec<u64>) -> Self {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        let n = counts.iter().sum();
        WaitingTimeSample {
            direction,
            counts,
            n,
        }
    }

    pub fn from_durations(direction: Direction, durations: &[usize]) -> Self {
        let max = durations.iter().copied().max().map_or(0, |m| m + 1);
        let mut counts = vec![0u64; max];
        for &k in durations {
            counts[k] += 1;
        }
        Self::from_counts(direction, counts)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, k: usize) -> u64 {
        self.counts.get(k).copied().unwrap_or(0)
    }

    /// Largest observed duration, if any.
    pub fn max_duration(&self) -> Option<usize> {
        self.counts.len().checked_sub(1)
    }

    /// Relative frequency of each duration `0..=max_duration`.
    pub fn normalized(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

/// Precomputed waiting times for every position of a sign series.
///
/// `remaining[i]` is the number of changes from `i` to the end of its run.
/// Positions in the final run are the only ones that can be censored.
pub(crate) struct WaitingTable<'a> {
    remaining: Vec<u32>,
    signs: &'a [Direction],
    final_run: usize,
}

impl<'a> WaitingTable<'a> {
    pub(crate) fn new(signs: &'a [Direction]) -> Self {
        let mut remaining = vec![0u32; signs.len()];
        let mut run = 0u32;
        for i in (0..signs.len()).rev() {
            run = if i + 1 < signs.len() && signs[i] == signs[i + 1] {
                run + 1
            } else {
                1
            };
            remaining[i] = run;
        }
        let final_run = signs
            .last()
            .map_or(0, |&last| signs.iter().rev().take_while(|&&d| d == last).count());
        WaitingTable {
            remaining,
            signs,
            final_run,
        }
    }

    /// Number of leading positions whose `direction` waiting time is uncensored.
    fn uncensored_prefix(&self, direction: Direction) -> usize {
        match self.signs.last() {
            Some(&last) if last == direction => self.signs.len() - self.final_run,
            _ => self.signs.len(),
        }
    }

    #[inline]
    fn duration(&self, i: usize, direction: Direction) -> usize {
        if self.signs[i] == direction {
            self.remaining[i] as usize
        } else {
            0
        }
    }

    pub(crate) fn sample(
        &self,
        direction: Direction,
        n_points: usize,
        policy: CensorPolicy,
        rng: &mut impl Rng,
    ) -> Result<WaitingTimeSample> {
        let len = self.signs.len();
        if len == 0 {
            return Err(Error::Size { needed: 1, got: 0 });
        }
        let valid = match policy {
            CensorPolicy::Discard => self.uncensored_prefix(direction),
            CensorPolicy::KeepTruncated => len,
        };
        if valid * 100 < len {
            return Err(Error::Degenerate(format!(
                "only {valid} of {len} positions give an uncensored {direction} waiting time"
            )));
        }
        // Censored positions form a suffix, so drawing uniformly from the
        // uncensored prefix is the same as redrawing until uncensored.
        let mut counts: Vec<u64> = Vec::new();
        for _ in 0..n_points {
            let k = self.duration(rng.random_range(0..valid), direction);
            if k >= counts.len() {
                counts.resize(k + 1, 0);
            }
            counts[k] += 1;
        }
        Ok(WaitingTimeSample::from_counts(direction, counts))
    }
}

/// Draws `n_points` positions uniformly with replacement and records the
/// `direction` waiting time at each.
///
/// Under [`CensorPolicy::Discard`], draws falling in a run that reaches the
/// end of the series are redrawn.
pub fn sample_waiting_times(
    signs: &SignSeries,
    direction: Direction,
    n_points: usize,
    rng_seed: u64,
    policy: CensorPolicy,
) -> Result<WaitingTimeSample> {
    if n_points == 0 {
        return Err(Error::Domain("n_points must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    WaitingTable::new(signs.as_slice()).sample(direction, n_points, policy, &mut rng)
}
