//! File formats, the parallel window scan and the `elemtrend` command
//! built on [`elemtrend_core`].

pub mod cli;
pub mod error;
pub mod format;
pub mod io;
pub mod scan;

pub use error::{Error, Result};
