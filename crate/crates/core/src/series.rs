//! Daily price series, monthly CPI series, constant-money deflation and returns.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use chrono::{Datelike, NaiveDate};

use crate::error::{Error, Result};

/// Label attached to one observation of a price series.
///
/// Real data carries calendar dates. Simulated series carry trading-day
/// ordinals so they flow through the same pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DateKey {
    Calendar(NaiveDate),
    Ordinal(u32),
}

impl DateKey {
    pub fn calendar(self) -> Option<NaiveDate> {
        match self {
            DateKey::Calendar(d) => Some(d),
            DateKey::Ordinal(_) => None,
        }
    }

    fn same_kind(self, other: DateKey) -> bool {
        matches!(
            (self, other),
            (DateKey::Calendar(_), DateKey::Calendar(_)) | (DateKey::Ordinal(_), DateKey::Ordinal(_))
        )
    }
}

impl fmt::Display for DateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DateKey::Calendar(d) => write!(f, "{d}"),
            DateKey::Ordinal(i) => write!(f, "{i}"),
        }
    }
}

impl From<NaiveDate> for DateKey {
    fn from(d: NaiveDate) -> Self {
        DateKey::Calendar(d)
    }
}

/// Dated sequence of daily closing values.
#[derive(Clone, Debug, PartialEq)]
pub struct PriceSeries {
    label: String,
    dates: Vec<DateKey>,
    values: Vec<f64>,
}

impl PriceSeries {
    /// Builds a series from entries already in ascending date order.
    ///
    /// Dates must be strictly increasing and of one kind, and every value
    /// finite and positive.
    pub fn new(label: impl Into<String>, entries: Vec<(DateKey, f64)>) -> Result<Self> {
        let mut dates = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (i, (date, value)) in entries.into_iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Data(format!(
                    "entry {i} ({date}): value {value} is not a positive number"
                )));
            }
            if let Some(&prev) = dates.last() {
                if !date.same_kind(prev) {
                    return Err(Error::Data(format!(
                        "entry {i} ({date}): mixes calendar dates and ordinals"
                    )));
                }
                if date <= prev {
                    return Err(Error::Data(format!(
                        "entry {i} ({date}): dates not strictly increasing after {prev}"
                    )));
                }
            }
            dates.push(date);
            values.push(value);
        }
        Ok(PriceSeries {
            label: label.into(),
            dates,
            values,
        })
    }

    /// Series labelled by trading-day ordinals 0, 1, 2, ...
    pub fn from_values(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let entries = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (DateKey::Ordinal(i as u32), v))
            .collect();
        PriceSeries::new(label, entries)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dates(&self) -> &[DateKey] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (DateKey, f64)> + '_ {
        self.dates.iter().copied().zip(self.values.iter().copied())
    }
}

/// A calendar month.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Month {
    year: i32,
    month: u32,
}

impl Month {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) || NaiveDate::from_ymd_opt(year, month, 1).is_none() {
            return Err(Error::Domain(format!("invalid month {year}-{month}")));
        }
        Ok(Month { year, month })
    }

    pub fn of(date: NaiveDate) -> Self {
        Month {
            year: date.year(),
            month: date.month(),
        }
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month
    }

    pub fn succ(self) -> Self {
        if self.month == 12 {
            Month {
                year: self.year + 1,
                month: 1,
            }
        } else {
            Month {
                year: self.year,
                month: self.month + 1,
            }
        }
    }

    /// Day on which the month's CPI value applies: the first of the month.
    pub fn anchor(self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year, self.month, 1).expect("validated month")
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

/// Gap-free monthly consumer price index.
#[derive(Clone, Debug, PartialEq)]
pub struct CpiSeries {
    first: Month,
    values: Vec<f64>,
}

impl CpiSeries {
    /// Entries must be in ascending month order with no month missing.
    pub fn new(entries: Vec<(Month, f64)>) -> Result<Self> {
        let Some(&(first, _)) = entries.first() else {
            return Err(Error::Data("CPI series is empty".into()));
        };
        let mut expected = first;
        let mut values = Vec::with_capacity(entries.len());
        for (month, value) in entries {
            if month < expected {
                return Err(Error::Data(format!(
                    "CPI month {month} is duplicated or out of order"
                )));
            }
            if month > expected {
                return Err(Error::Gap { month: expected });
            }
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Data(format!(
                    "CPI value {value} for {month} is not positive"
                )));
            }
            values.push(value);
            expected = expected.succ();
        }
        Ok(CpiSeries { first, values })
    }

    pub fn first_month(&self) -> Month {
        self.first
    }

    pub fn last_month(&self) -> Month {
        (1..self.values.len()).fold(self.first, |m, _| m.succ())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (Month, f64)> + '_ {
        let mut month = self.first;
        self.values.iter().map(move |&v| {
            let m = month;
            month = month.succ();
            (m, v)
        })
    }

    fn index_of(&self, month: Month) -> Option<usize> {
        let offset = (month.year - self.first.year) as i64 * 12 + month.month as i64
            - self.first.month as i64;
        usize::try_from(offset).ok().filter(|&i| i < self.values.len())
    }

    /// CPI on `date`, linear in calendar days between first-of-month anchors.
    pub fn at(&self, date: NaiveDate) -> Result<f64> {
        let first = self.first.anchor();
        let last = self.last_month().anchor();
        let month = Month::of(date);
        let i = match self.index_of(month) {
            Some(i) if date >= first && date <= last => i,
            _ => return Err(Error::date_out_of_range(date, first, last)),
        };
        let lo = self.values[i];
        if date == month.anchor() {
            return Ok(lo);
        }
        let hi = self.values[i + 1];
        let span = (month.succ().anchor() - month.anchor()).num_days() as f64;
        let offset = (date - month.anchor()).num_days() as f64;
        Ok(lo + (hi - lo) * offset / span)
    }
}

/// Daily CPI values for `dates`, linearly interpolated between monthly anchors.
pub fn interpolate_cpi_daily(cpi: &CpiSeries, dates: &[NaiveDate]) -> Result<Vec<f64>> {
    dates.iter().map(|&d| cpi.at(d)).collect()
}

/// Expresses prices in constant money of `base_date`.
///
/// `base_date` defaults to the first date of the series.
pub fn deflate(
    prices: &PriceSeries,
    cpi: &CpiSeries,
    base_date: Option<NaiveDate>,
) -> Result<PriceSeries> {
    let calendar = |k: DateKey| {
        k.calendar()
            .ok_or_else(|| Error::Data(format!("cannot deflate ordinal-dated entry {k}")))
    };
    let base_date = match base_date {
        Some(d) => d,
        None => calendar(*prices.dates.first().ok_or(Error::Size { needed: 1, got: 0 })?)?,
    };
    let base = cpi.at(base_date)?;
    let mut values = Vec::with_capacity(prices.len());
    for (date, value) in prices.iter() {
        let level = cpi.at(calendar(date)?)?;
        values.push(value * (base / level));
    }
    Ok(PriceSeries {
        label: prices.label.clone(),
        dates: prices.dates.clone(),
        values,
    })
}

/// One-day log and simple returns.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnSeries {
    pub dates: Vec<DateKey>,
    pub log_returns: Vec<f64>,
    pub simple_returns: Vec<f64>,
}

impl ReturnSeries {
    pub fn len(&self) -> usize {
        self.log_returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_returns.is_empty()
    }
}

/// Returns over one trading day, dated by the start of each step.
pub fn returns(prices: &PriceSeries) -> Result<ReturnSeries> {
    if prices.len() < 2 {
        return Err(Error::Size {
            needed: 2,
            got: prices.len(),
        });
    }
    let (log_returns, simple_returns) = prices
        .values
        .windows(2)
        .map(|w| (libm::log(w[1]) - libm::log(w[0]), (w[1] - w[0]) / w[0]))
        .unzip();
    Ok(ReturnSeries {
        dates: prices.dates[..prices.len() - 1].to_vec(),
        log_returns,
        simple_returns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    fn jan_feb() -> CpiSeries {
        CpiSeries::new(vec![
            (Month::new(2000, 1).unwrap(), 100.0),
            (Month::new(2000, 2).unwrap(), 103.0),
        ])
        .unwrap()
    }

    #[test]
    fn anchor_is_exact() {
        let cpi = jan_feb();
        assert_eq!(cpi.at(ymd(2000, 1, 1)).unwrap(), 100.0);
        assert_eq!(cpi.at(ymd(2000, 2, 1)).unwrap(), 103.0);
    }

    #[test]
    fn mid_month_is_linear_in_calendar_days() {
        let v = interpolate_cpi_daily(&jan_feb(), &[ymd(2000, 1, 16)]).unwrap();
        assert!((v[0] - (100.0 + 3.0 * 15.0 / 31.0)).abs() < 1e-12);
        assert!((v[0] - 101.451_612_903_225_8).abs() < 1e-12);
    }

    #[test]
    fn outside_anchor_range() {
        let cpi = jan_feb();
        assert!(matches!(cpi.at(ymd(1999, 12, 31)), Err(Error::Range(_))));
        assert!(matches!(cpi.at(ymd(2000, 2, 2)), Err(Error::Range(_))));
    }

    #[test]
    fn gap_names_missing_month() {
        let err = CpiSeries::new(vec![
            (Month::new(1980, 1).unwrap(), 77.8),
            (Month::new(1980, 3).unwrap(), 79.0),
        ])
        .unwrap_err();
        assert_eq!(
            err,
            Error::Gap {
                month: Month::new(1980, 2).unwrap()
            }
        );
        assert!(alloc::string::ToString::to_string(&err).contains("1980-02"));
    }

    #[test]
    fn december_rolls_over() {
        let cpi = CpiSeries::new(vec![
            (Month::new(1999, 12).unwrap(), 50.0),
            (Month::new(2000, 1).unwrap(), 81.0),
        ])
        .unwrap();
        assert_eq!(cpi.last_month(), Month::new(2000, 1).unwrap());
        assert!((cpi.at(ymd(1999, 12, 11)).unwrap() - 60.0).abs() < 1e-12);
    }

    #[test]
    fn deflate_halves_when_cpi_doubles() {
        let cpi = jan_feb();
        let prices = PriceSeries::new("X", vec![(ymd(2000, 2, 1).into(), 103.0)]).unwrap();
        let out = deflate(&prices, &cpi, Some(ymd(2000, 1, 1))).unwrap();
        assert_eq!(out.values(), &[100.0]);
    }

    #[test]
    fn deflate_rejects_ordinals() {
        let prices = PriceSeries::from_values("sim", vec![1.0, 2.0]).unwrap();
        assert!(deflate(&prices, &jan_feb(), Some(ymd(2000, 1, 1))).is_err());
    }

    #[test]
    fn returns_hand_values() {
        let s = PriceSeries::from_values("x", vec![100.0, 110.0, 99.0]).unwrap();
        let r = returns(&s).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r.simple_returns[0] - 0.1).abs() < 1e-15);
        assert!((r.log_returns[0] - 0.095_310_179_804_324_9).abs() < 1e-12);
        assert!((r.simple_returns[1] + 0.1).abs() < 1e-15);
        assert!((r.log_returns[1] + 0.105_360_515_657_826_3).abs() < 1e-12);
    }

    #[test]
    fn returns_flat_and_short() {
        let r = returns(&PriceSeries::from_values("x", vec![100.0, 100.0]).unwrap()).unwrap();
        assert_eq!((r.log_returns[0], r.simple_returns[0]), (0.0, 0.0));
        let one = PriceSeries::from_values("x", vec![1.0]).unwrap();
        assert_eq!(returns(&one), Err(Error::Size { needed: 2, got: 1 }));
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(PriceSeries::from_values("x", vec![1.0, 0.0]).is_err());
        let d = DateKey::from(ymd(2000, 1, 1));
        assert!(PriceSeries::new("x", vec![(d, 1.0), (d, 2.0)]).is_err());
        assert!(PriceSeries::new("x", vec![(d, 1.0), (DateKey::Ordinal(5), 2.0)]).is_err());
    }
}
