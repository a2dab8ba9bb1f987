use alloc::string::String;
use core::fmt;

use chrono::NaiveDate;

use crate::series::Month;

/// Errors raised by the analysis pipeline.
#[derive(Clone, Debug, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// A series is shorter than an operation requires.
    Size { needed: usize, got: usize },
    /// A position or date lies outside the valid domain.
    Range(String),
    /// A CPI series is missing a month.
    Gap { month: Month },
    /// Malformed or invalid input data.
    Data(String),
    /// An argument violates its mathematical domain.
    Domain(String),
    /// A window or parameter that cannot support the test.
    Degenerate(String),
    /// Sample mass lies outside the cell partition.
    Partition(String),
    /// Too many bootstrap replicates failed.
    Calibration { degenerate: usize, total: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

impl Error {
    pub(crate) fn date_out_of_range(date: NaiveDate, first: NaiveDate, last: NaiveDate) -> Self {
        Error::Range(alloc::format!(
            "date {date} outside CPI anchor range [{first}, {last}]"
        ))
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Size { needed, got } => {
                write!(f, "series too short: need at least {needed}, got {got}")
            }
            Error::Range(msg) => write!(f, "out of range: {msg}"),
            Error::Gap { month } => write!(f, "CPI series has a gap: missing month {month}"),
            Error::Data(msg) => write!(f, "invalid data: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Degenerate(msg) => write!(f, "degenerate window: {msg}"),
            Error::Partition(msg) => write!(f, "partition error: {msg}"),
            Error::Calibration { degenerate, total } => write!(
                f,
                "calibration failed: {degenerate} of {total} bootstrap replicates were degenerate"
            ),
        }
    }
}

impl core::error::Error for Error {}
