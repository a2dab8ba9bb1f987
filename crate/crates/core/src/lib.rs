//! Elemental price trends and a test of their memorylessness.
//!
//! A daily price series is reduced to the signs of its changes. Under
//! independent signs the duration of a trend is geometric, and windows of
//! the series are tested against that law with a discrete Anderson-Darling
//! statistic whose null distribution is obtained by parametric bootstrap.
//!
//! The crate is `no_std` and needs only `alloc`; file formats, the
//! parallel scan and the command-line front end live in `elemtrend`.

#![no_std]
extern crate alloc;

pub mod emh;
pub mod error;
pub mod geom;
pub mod gof;
pub mod seed;
pub mod series;
pub mod trends;
pub mod window;

pub use error::{Error, Result};
pub use geom::GeometricModel;
pub use gof::{AdTestResult, CellPartition, McConfig};
pub use series::{CpiSeries, DateKey, Month, PriceSeries, ReturnSeries};
pub use trends::{CensorPolicy, Direction, Run, SignSeries, WaitingTimeSample};
pub use window::{WindowOutcome, WindowReport, WindowSpec};
