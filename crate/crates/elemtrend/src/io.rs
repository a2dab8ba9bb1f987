//! CSV file formats.
//!
//! | file | header |
//! |------|--------|
//! | daily prices (Yahoo export) | `Date,Open,High,Low,Close,Adj Close,Volume` |
//! | canonical prices | `Date,Close` |
//! | monthly CPI | `Month,Value` |
//! | waiting-time histogram | `k,count,frequency` |
//! | window report | `start_date,up_ratio,up_a2,up_pi,down_a2,down_pi,skipped` |
//! | test results | `window_start,direction,n,theta_hat,a2,pi_value,m_replicates,seed` |
//! | up-ratio series | `start_date,up_ratio,band_lower,band_upper` |

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use csv::{ReaderBuilder, StringRecord, Trim};
use elemtrend_core::window::WindowOutcome;
use elemtrend_core::{
    CpiSeries, DateKey, Direction, Month, PriceSeries, SignSeries, WaitingTimeSample, WindowReport,
};

use crate::error::{Error, Result};
use crate::format::num;

pub const PRICES_HEADER: &str = "Date,Close";
pub const CPI_HEADER: &str = "Month,Value";
pub const HISTOGRAM_HEADER: &str = "k,count,frequency";
pub const REPORT_HEADER: &str = "start_date,up_ratio,up_a2,up_pi,down_a2,down_pi,skipped";
pub const RESULTS_HEADER: &str = "window_start,direction,n,theta_hat,a2,pi_value,m_replicates,seed";
pub const UPRATIO_HEADER: &str = "start_date,up_ratio,band_lower,band_upper";

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn line_of(record: &StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_date_key(s: &str) -> Option<DateKey> {
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(DateKey::Calendar(d));
    }
    s.parse::<u32>().ok().map(DateKey::Ordinal)
}

/// Reads daily closes from a Yahoo-style export or a canonical
/// `Date,Close` file. Rows may come in any order.
pub fn parse_prices(csv_text: &str, label: &str) -> Result<PriceSeries> {
    let mut reader = ReaderBuilder::new()
        .trim(Trim::All)
        .from_reader(csv_text.as_bytes());
    let headers = reader.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let (Some(date_col), Some(close_col)) = (column("Date"), column("Close")) else {
        return Err(Error::Header {
            expected: "Date,Open,High,Low,Close,Adj Close,Volume or Date,Close".into(),
            found: headers.iter().map(String::from).collect(),
        });
    };
    let mut rows: Vec<(DateKey, f64, u64)> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = line_of(&record);
        let field = |i: usize| record.get(i).unwrap_or("");
        let date = parse_date_key(field(date_col))
            .ok_or_else(|| Error::row(line, format!("invalid Date {:?}", field(date_col))))?;
        let raw = field(close_col);
        let close: f64 = raw
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::row(line, format!("Close {raw:?} is not a number")))?;
        if close <= 0.0 {
            return Err(Error::row(line, format!("non-positive Close {raw}")));
        }
        rows.push((date, close, line));
    }
    if rows.is_empty() {
        return Err(Error::Empty);
    }
    rows.sort_by_key(|&(date, _, line)| (date, line));
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::row(
                pair[1].2,
                format!("duplicate date {} (first on line {})", pair[1].0, pair[0].2),
            ));
        }
    }
    Ok(PriceSeries::new(
        label,
        rows.into_iter().map(|(d, v, _)| (d, v)).collect(),
    )?)
}

/// Canonical `Date,Close` text of a series.
pub fn write_prices(prices: &PriceSeries) -> String {
    let mut out = String::with_capacity(24 * prices.len());
    out.push_str(PRICES_HEADER);
    out.push('\n');
    for (date, value) in prices.iter() {
        let _ = writeln!(out, "{date},{}", num(value));
    }
    out
}

fn parse_month(s: &str) -> Option<Month> {
    let (y, m) = s.split_once('-')?;
    if y.len() != 4 || m.len() != 2 {
        return None;
    }
    Month::new(y.parse().ok()?, m.parse().ok()?).ok()
}

/// Reads a monthly CPI file; the `Month,Value` header is optional.
pub fn parse_cpi(csv_text: &str) -> Result<CpiSeries> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .trim(Trim::All)
        .flexible(true)
        .from_reader(csv_text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = line_of(&record);
        if i == 0 && record.get(0) == Some("Month") {
            continue;
        }
        if record.len() != 2 {
            return Err(Error::row(line, format!("expected 2 fields, found {}", record.len())));
        }
        let month = parse_month(&record[0])
            .ok_or_else(|| Error::row(line, format!("invalid Month {:?}", &record[0])))?;
        let value: f64 = record[1]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v > 0.0)
            .ok_or_else(|| Error::row(line, format!("invalid CPI value {:?}", &record[1])))?;
        rows.push((month, value));
    }
    if rows.is_empty() {
        return Err(Error::Empty);
    }
    rows.sort_by_key(|&(m, _)| m);
    Ok(CpiSeries::new(rows)?)
}

pub fn write_cpi(cpi: &CpiSeries) -> String {
    let mut out = format!("{CPI_HEADER}\n");
    for (month, value) in cpi.iter() {
        let _ = writeln!(out, "{month},{}", num(value));
    }
    out
}

/// `k,count,frequency` rows for `k = 0..=max`.
pub fn write_histogram(sample: &WaitingTimeSample) -> String {
    let mut out = format!("{HISTOGRAM_HEADER}\n");
    for (k, (&count, freq)) in sample.counts().iter().zip(sample.normalized()).enumerate() {
        let _ = writeln!(out, "{k},{count},{}", num(freq));
    }
    out
}

/// Durations from either a histogram file (`k,count,frequency`) or a list
/// of integers, one per line with an optional header.
pub fn parse_durations(text: &str) -> Result<Vec<u64>> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .trim(Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    let mut histogram = false;
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = line_of(&record);
        let first = record.get(0).unwrap_or("");
        if i == 0 && first.parse::<u64>().is_err() {
            histogram = first == "k";
            continue;
        }
        if first.is_empty() {
            continue;
        }
        let k: u64 = first
            .parse()
            .map_err(|_| Error::row(line, format!("invalid duration {first:?}")))?;
        if histogram {
            let count: u64 = record
                .get(1)
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| Error::row(line, "invalid count"))?;
            out.extend(std::iter::repeat_n(k, count as usize));
        } else {
            out.push(k);
        }
    }
    Ok(out)
}

/// Signs from either a price file or `+`/`-` text.
pub fn parse_signs(text: &str) -> Result<SignSeries> {
    let first = text.lines().next().unwrap_or("");
    if first.contains("Date") {
        let prices = parse_prices(text, "signs")?;
        Ok(elemtrend_core::trends::signs(&prices)?)
    } else {
        Ok(text.parse()?)
    }
}

fn test_fields(report: &WindowReport, direction: Direction) -> (String, String) {
    report
        .test(direction)
        .map(|t| (num(t.result.a2), num(t.result.pi_value)))
        .unwrap_or_default()
}

/// One row per window, labelled by the window's first date.
pub fn write_report(reports: &[WindowReport]) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for r in reports {
        let (up_a2, up_pi) = test_fields(r, Direction::Up);
        let (down_a2, down_pi) = test_fields(r, Direction::Down);
        let _ = writeln!(
            out,
            "{},{},{up_a2},{up_pi},{down_a2},{down_pi},{}",
            r.start_date,
            num(r.up_ratio),
            r.is_skipped() as u8
        );
    }
    out
}

/// One row per tested window and direction.
pub fn write_results(reports: &[WindowReport]) -> String {
    let mut out = format!("{RESULTS_HEADER}\n");
    for r in reports {
        if let WindowOutcome::Tested { up, down } = &r.outcome {
            for t in [up, down] {
                let t = &t.result;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r.start_date,
                    t.direction,
                    t.n,
                    num(t.theta_hat),
                    num(t.a2),
                    num(t.pi_value),
                    t.m_replicates,
                    t.seed
                );
            }
        }
    }
    out
}

/// Half-width `z * sqrt(0.25 / changes)` of the fair-coin band.
pub fn fair_coin_band(window_length: usize, z: f64) -> f64 {
    z * (0.25 / (window_length - 1) as f64).sqrt()
}

pub fn write_upratio(rows: &[(DateKey, f64)], band: f64) -> String {
    let mut out = format!("{UPRATIO_HEADER}\n");
    let (lo, hi) = (num(0.5 - band), num(0.5 + band));
    for (date, ratio) in rows {
        let _ = writeln!(out, "{date},{},{lo},{hi}", num(*ratio));
    }
    out
}
