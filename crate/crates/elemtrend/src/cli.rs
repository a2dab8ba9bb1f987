//! Command-line front end.
//!
//! Exit codes: 0 success, 2 input or usage error, 3 the data cannot
//! support the analysis.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use elemtrend_core::emh::{simulate_grw, GrwParams};
use elemtrend_core::geom::estimate_theta_from_signs;
use elemtrend_core::gof::{ad_test_durations, ThetaSource};
use elemtrend_core::series::deflate;
use elemtrend_core::window::up_ratio_series;
use elemtrend_core::{CensorPolicy, Direction, GeometricModel, McConfig, PriceSeries, WindowSpec};

use crate::error::{Error, Result};
use crate::format::num;
use crate::io;
use crate::scan::{analyze_series_parallel, ScanSummary};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "elemtrend", version, about = "Test elemental price-trend durations against the memoryless geometric law")]
pub struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Master seed; required by every command that draws random numbers.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for the window scan (0 = one per CPU).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Window length in trading days.
    #[arg(long, global = true, default_value_t = 1000)]
    window: usize,
    /// Shift between consecutive windows in trading days.
    #[arg(long, global = true, default_value_t = 1)]
    step: usize,
    /// Random points drawn per window and direction.
    #[arg(long, global = true, default_value_t = 500)]
    points: usize,
    /// Bootstrap replicates per test.
    #[arg(long, global = true, default_value_t = 999)]
    replicates: usize,
    /// Minimum expected count of the merged tail cell.
    #[arg(long, global = true, default_value_t = 5.0)]
    min_expected: f64,
    /// Directory receiving output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Treatment of draws whose run reaches the end of the window.
    #[arg(long, global = true, value_enum, default_value_t = Censor::Discard)]
    censor: Censor,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Censor {
    Discard,
    KeepTruncated,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Dir {
    Up,
    Down,
}

impl From<Dir> for Direction {
    fn from(d: Dir) -> Self {
        match d {
            Dir::Up => Direction::Up,
            Dir::Down => Direction::Down,
        }
    }
}

#[derive(Debug, Args)]
struct PriceInput {
    /// Daily price CSV (Yahoo export or Date,Close).
    #[arg(long)]
    prices: PathBuf,
    /// Monthly CPI CSV; when given, prices are deflated first.
    #[arg(long)]
    cpi: Option<PathBuf>,
    /// Constant-money base date (default: first price date).
    #[arg(long)]
    base_date: Option<NaiveDate>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Express prices in constant money.
    Deflate {
        /// Daily price CSV (Yahoo export or Date,Close).
        #[arg(long)]
        prices: PathBuf,
        /// Monthly CPI CSV.
        #[arg(long)]
        cpi: PathBuf,
        /// Constant-money base date (default: first price date).
        #[arg(long)]
        base_date: Option<NaiveDate>,
        /// Output file (default: <out-dir>/deflated.csv).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Test every window against the geometric law.
    Analyze {
        #[command(flatten)]
        input: PriceInput,
        /// Also write one histogram CSV per window and direction.
        #[arg(long)]
        histograms: bool,
    },
    /// Share of up moves per window with a fair-coin band.
    Upratio {
        #[command(flatten)]
        input: PriceInput,
        /// Band half-width in binomial standard errors.
        #[arg(long, default_value_t = 3.0)]
        z: f64,
        /// Output file (default: <out-dir>/upratio.csv).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Simulate a log-normal geometric random walk.
    Simulate {
        #[arg(long, default_value_t = 100.0)]
        s0: f64,
        /// Log-return volatility per step.
        #[arg(long)]
        sigma: f64,
        /// Risk-free rate per step.
        #[arg(long, default_value_t = 0.0)]
        rf: f64,
        /// Number of steps; the file has steps + 1 rows.
        #[arg(long)]
        steps: usize,
        /// Output file (default: <out-dir>/simulated.csv).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Anderson-Darling test of a list of durations.
    Gof {
        /// Durations, one per line, or a k,count,frequency histogram.
        #[arg(long)]
        durations: PathBuf,
        /// Known continuation probability.
        #[arg(long, conflicts_with = "signs")]
        theta: Option<f64>,
        /// Price CSV or +/- text to estimate the parameter from.
        #[arg(long)]
        signs: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Dir::Up)]
        direction: Dir,
    },
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Core(
                    elemtrend_core::Error::Degenerate(_) | elemtrend_core::Error::Calibration { .. },
                ) => EXIT_DEGENERATE,
                _ => EXIT_INPUT,
            }
        }
    }
}

impl GlobalArgs {
    fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Usage("--seed is required for this command".into()))
    }

    fn mc_config(&self) -> Result<McConfig> {
        let cfg = McConfig {
            m_replicates: self.replicates,
            n_points: self.points,
            min_expected: self.min_expected,
            master_seed: self.seed()?,
            censor: match self.censor {
                Censor::Discard => CensorPolicy::Discard,
                Censor::KeepTruncated => CensorPolicy::KeepTruncated,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn window_spec(&self) -> Result<WindowSpec> {
        let spec = WindowSpec {
            length: self.window,
            step: self.step,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn out(&self, explicit: &Option<PathBuf>, default: &str) -> PathBuf {
        explicit.clone().unwrap_or_else(|| self.out_dir.join(default))
    }
}

fn label_of(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "prices".into(), |s| s.to_string_lossy().into_owned())
}

fn load_prices(path: &Path) -> Result<PriceSeries> {
    let text = io::read_file(path)?;
    io::parse_prices(&text, &label_of(path)).map_err(|e| in_file(path, e))
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Io { .. } => e,
        other => Error::Usage(format!("{}: {other}", path.display())),
    }
}

fn load_input(input: &PriceInput) -> Result<PriceSeries> {
    let prices = load_prices(&input.prices)?;
    match &input.cpi {
        Some(cpi_path) => {
            let cpi = io::parse_cpi(&io::read_file(cpi_path)?).map_err(|e| in_file(cpi_path, e))?;
            Ok(deflate(&prices, &cpi, input.base_date)?)
        }
        None => Ok(prices),
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let g = &cli.global;
    match &cli.command {
        Command::Deflate {
            prices,
            cpi,
            base_date,
            output,
        } => {
            let series = load_input(&PriceInput {
                prices: prices.clone(),
                cpi: Some(cpi.clone()),
                base_date: *base_date,
            })?;
            let path = g.out(output, "deflated.csv");
            io::write_file(&path, &io::write_prices(&series))?;
            println!("{} rows written to {}", series.len(), path.display());
        }
        Command::Analyze { input, histograms } => {
            let cfg = g.mc_config()?;
            let spec = g.window_spec()?;
            let prices = load_input(input)?;
            let started = Instant::now();
            let reports = analyze_series_parallel(&prices, &spec, &cfg, g.threads)?;
            io::write_file(&g.out_dir.join("report.csv"), &io::write_report(&reports))?;
            io::write_file(&g.out_dir.join("results.csv"), &io::write_results(&reports))?;
            if *histograms {
                for r in &reports {
                    for d in [Direction::Up, Direction::Down] {
                        if let Some(t) = r.test(d) {
                            let name = format!("{}_{d}.csv", r.start_date);
                            io::write_file(
                                &g.out_dir.join("histograms").join(name),
                                &io::write_histogram(&t.histogram),
                            )?;
                        }
                    }
                }
            }
            let summary = ScanSummary::of(&reports);
            eprintln!(
                "windows: {} analyzed, {} skipped; wall time {:.1} s",
                summary.analyzed,
                summary.skipped,
                started.elapsed().as_secs_f64()
            );
            if summary.mostly_degenerate() {
                eprintln!("error: more than half of the windows are degenerate");
                return Ok(EXIT_DEGENERATE);
            }
        }
        Command::Upratio { input, z, output } => {
            let spec = g.window_spec()?;
            if !(z.is_finite() && *z >= 0.0) {
                return Err(Error::Usage(format!("--z {z} must be a non-negative number")));
            }
            let prices = load_input(input)?;
            let rows = up_ratio_series(&prices, &spec)?;
            let path = g.out(output, "upratio.csv");
            io::write_file(&path, &io::write_upratio(&rows, io::fair_coin_band(spec.length, *z)))?;
            println!("{} rows written to {}", rows.len(), path.display());
        }
        Command::Simulate {
            s0,
            sigma,
            rf,
            steps,
            output,
        } => {
            let seed = g.seed()?;
            if *steps < 2 {
                return Err(Error::Usage(format!("--steps {steps} must be at least 2")));
            }
            let params = GrwParams::new(*s0, *sigma, *rf, *steps)?;
            let series = simulate_grw(&params, seed)?;
            let path = g.out(output, "simulated.csv");
            io::write_file(&path, &io::write_prices(&series))?;
            println!("{} rows written to {}", series.len(), path.display());
        }
        Command::Gof {
            durations,
            theta,
            signs,
            direction,
        } => {
            let seed = g.seed()?;
            let data = io::parse_durations(&io::read_file(durations)?)
                .map_err(|e| in_file(durations, e))?;
            if data.len() < 30 {
                return Err(Error::Usage(format!(
                    "{}: {} durations, at least 30 required",
                    durations.display(),
                    data.len()
                )));
            }
            let source = match (theta, signs) {
                (Some(t), _) => ThetaSource::Fixed(GeometricModel::new(*t)?),
                (None, Some(path)) => {
                    let s = io::parse_signs(&io::read_file(path)?).map_err(|e| in_file(path, e))?;
                    ThetaSource::Signs {
                        estimate: estimate_theta_from_signs(&s, (*direction).into())?,
                        direction: (*direction).into(),
                        signs_len: s.len(),
                    }
                }
                (None, None) => {
                    return Err(Error::Usage("gof needs --theta or --signs".into()));
                }
            };
            let cfg = McConfig {
                m_replicates: g.replicates,
                min_expected: g.min_expected,
                master_seed: seed,
                ..McConfig::new(seed)
            };
            let r = ad_test_durations(&data, source, &cfg)?;
            println!("a2,pi_value,n,theta,seed,m_replicates");
            println!(
                "{},{},{},{},{},{}",
                num(r.a2),
                num(r.pi_value),
                r.n,
                num(r.theta_hat),
                r.seed,
                r.m_replicates
            );
        }
    }
    Ok(0)
}
