//! Command-line front end.
//!
//! Every subcommand produces a [`Report`]: a table of rows plus one verdict
//! per verification suite. Exit codes: 0 when every suite passes, 1 when
//! any suite fails, 2 for usage, config or I/O errors.

mod config;
mod report;

pub use config::{
    parse_config, ConfigError, GridParams, RunConfig, TimeWindow, Tolerances, WellParams,
};
pub use report::{Relation, Report, Suite, Value};

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::distcalc::{DistExpr, SmoothFn};
use crate::isw::{self, JumpMethod, WellError};
use crate::packets::{self, PacketError};
use crate::par::{self, Execution};

/// Environment variable holding the seed for random-packet suites.
pub const SEED_ENV: &str = "WELLSPRING_SEED";
pub const DEFAULT_SEED: u64 = 42;

const RANDOM_PACKETS: usize = 100;
const RANDOM_MAX_MODES: usize = 25;

#[derive(Debug, Parser)]
#[command(
    name = "wellspring",
    version,
    about = "Infinite square well: singular potential and Ehrenfest checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Highest quantum number for per-state tables
    #[arg(long, global = true, value_name = "INT")]
    n_max: Option<u32>,
    /// Add grid-quadrature oracle columns
    #[arg(long, global = true)]
    oracle: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Table of wave numbers and energies
    Eigen,
    /// Stationary-equation residuals of the eigenstates
    VerifyTise,
    /// Slope jumps at the walls by both methods
    Jumps,
    /// The naive step-function potential and its trivial solution
    NaiveDemo,
    /// Ehrenfest series for a packet over time
    Ehrenfest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid {SEED_ENV}: {0:?}")]
    Seed(String),
    #[error(transparent)]
    Well(#[from] WellError),
    #[error(transparent)]
    Packet(#[from] PacketError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Well(_) | CliError::Packet(_) => 1,
            _ => 2,
        }
    }
}

/// Seed from `WELLSPRING_SEED`, defaulting to 42.
pub fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Seed(v)),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Run the CLI on `argv` (including the program name) and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            eprintln!(
                "{}",
                text.lines().next().unwrap_or("error: invalid arguments")
            );
            return 2;
        }
    };
    match execute(&cli) {
        Ok(passed) => {
            if passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
                path: path.clone(),
                source,
            })?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    let report = match cli.command {
        Command::Eigen => eigen(&config, cli.n_max.unwrap_or(10))?,
        Command::VerifyTise => verify_tise(&config, cli.n_max.unwrap_or(20))?,
        Command::Jumps => jumps(&config, cli.n_max.unwrap_or(20))?,
        Command::NaiveDemo => naive_demo(&config)?,
        Command::Ehrenfest => ehrenfest(&config, cli.oracle, seed_from_env()?)?,
    };
    let text = match cli.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?,
        None => print!("{text}"),
    }
    Ok(report.all_passed())
}

fn check_n_max(n_max: u32) -> Result<Vec<i64>, CliError> {
    if n_max == 0 {
        return Err(CliError::Usage("--n-max must be at least 1".into()));
    }
    Ok((1..=i64::from(n_max)).collect())
}

pub fn eigen(config: &RunConfig, n_max: u32) -> Result<Report, CliError> {
    let cfg = config.well_config();
    let mut report = Report::new("eigen", config, &["n", "k", "E", "norm"]);
    let mut worst: f64 = 0.0;
    for n in check_n_max(n_max)? {
        let s = isw::eigenstate(&cfg, n)?;
        let density = s.expr.mul(&s.expr).map_err(WellError::from)?;
        let norm = density
            .integrate(0.0, cfg.length())
            .map_err(WellError::from)?;
        worst = worst.max((norm - 1.0).abs());
        report.push_row(vec![
            Value::Int(n),
            Value::Real(s.k),
            Value::Real(s.energy),
            Value::Real(norm),
        ]);
    }
    report.suites.push(Suite::at_most(
        "normalization",
        worst,
        config.tolerances.symbolic,
    ));
    Ok(report)
}

pub fn verify_tise(config: &RunConfig, n_max: u32) -> Result<Report, CliError> {
    let cfg = config.well_config();
    let ns = check_n_max(n_max)?;
    let rows = par::try_map(
        &ns,
        Execution::default(),
        |&n| -> Result<(f64, f64, usize), WellError> {
            let s = isw::eigenstate(&cfg, n)?;
            let r = isw::tise_residual(&cfg, &s.expr, s.energy)?;
            Ok((s.energy, r.max_abs_coefficient(), r.terms().len()))
        },
    )?;
    let mut report = Report::new(
        "verify-tise",
        config,
        &["n", "E", "residual_max", "residual_terms"],
    );
    let mut worst: f64 = 0.0;
    for (n, (e, r, terms)) in ns.iter().zip(rows) {
        worst = worst.max(r);
        report.push_row(vec![
            Value::Int(*n),
            Value::Real(e),
            Value::Real(r),
            Value::Int(terms as i64),
        ]);
    }
    report.suites.push(Suite::at_most(
        "tise-residual",
        worst,
        config.tolerances.symbolic,
    ));
    Ok(report)
}

pub fn jumps(config: &RunConfig, n_max: u32) -> Result<Report, CliError> {
    let cfg = config.well_config();
    let l = cfg.length();
    let mut report = Report::new(
        "jumps",
        config,
        &[
            "n",
            "jump0_integral",
            "jump0_one_sided",
            "jumpL_integral",
            "jumpL_one_sided",
            "jump0_expected",
            "jumpL_expected",
            "cross_check",
        ],
    );
    let (mut cross, mut closed): (f64, f64) = (0.0, 0.0);
    for n in check_n_max(n_max)? {
        let s = isw::eigenstate(&cfg, n)?;
        let j0i = isw::derivative_jump(&s, 0.0, JumpMethod::Integral)?;
        let j0o = isw::derivative_jump(&s, 0.0, JumpMethod::OneSided)?;
        let jli = isw::derivative_jump(&s, l, JumpMethod::Integral)?;
        let jlo = isw::derivative_jump(&s, l, JumpMethod::OneSided)?;
        let amp = (2.0 / l).sqrt() * s.k;
        let e0 = amp;
        let el = -amp * if n % 2 == 0 { 1.0 } else { -1.0 };
        let delta = (j0i - j0o).abs().max((jli - jlo).abs());
        cross = cross.max(delta);
        let rel = |a: f64, b: f64| (a - b).abs() / 1f64.max(a.abs()).max(b.abs());
        closed = closed
            .max(rel(j0i, e0))
            .max(rel(jli, el))
            .max(rel(j0o, e0))
            .max(rel(jlo, el));
        let mut row = vec![Value::Int(n)];
        row.extend([j0i, j0o, jli, jlo, e0, el, delta].map(Value::Real));
        report.push_row(row);
    }
    report.suites.push(Suite::at_most(
        "jump-cross-check",
        cross,
        config.tolerances.symbolic,
    ));
    report.suites.push(Suite::at_most(
        "jump-closed-form",
        closed,
        config.tolerances.symbolic,
    ));
    Ok(report)
}

pub fn naive_demo(config: &RunConfig) -> Result<Report, CliError> {
    let cfg = config.well_config();
    let l = cfg.length();
    let g = SmoothFn::sin((2.0 / l).sqrt(), 1, l);
    let expr: DistExpr = isw::naive_potential_residual(&cfg, &g);
    let mut report = Report::new("naive-demo", config, &["x", "G", "naive_VPsi", "inside"]);
    const SAMPLES: usize = 80;
    let (mut inside_worst, mut outside_dev, mut outside_max): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..SAMPLES {
        let x = -0.5 * l + (i as f64 + 0.5) * 2.0 * l / SAMPLES as f64;
        let v = expr.evaluate_regular(x).map_err(WellError::from)?;
        let gx = g.eval(x);
        let inside = 0.0 < x && x < l;
        if inside {
            inside_worst = inside_worst.max(v.abs());
        } else {
            outside_dev = outside_dev.max((v - gx).abs());
            outside_max = outside_max.max(v.abs());
        }
        report.push_row(vec![
            Value::Real(x),
            Value::Real(gx),
            Value::Real(v),
            Value::Int(inside as i64),
        ]);
    }
    let tol = config.tolerances.symbolic;
    report
        .suites
        .push(Suite::at_most("naive-inside-zero", inside_worst, tol));
    report
        .suites
        .push(Suite::at_most("naive-outside-equals-G", outside_dev, tol));
    report
        .suites
        .push(Suite::above("naive-outside-nonzero", outside_max, tol));
    Ok(report)
}

pub fn ehrenfest(config: &RunConfig, oracle: bool, seed: u64) -> Result<Report, CliError> {
    let cfg = config.well_config();
    let packet = config.wave_packet();
    let times = config.times();
    let oracle_h = oracle.then_some(config.grid.h);
    let series = packets::ehrenfest_report(&packet, &times, oracle_h, Execution::default())?;

    let mut columns = vec!["t", "P", "dPdt", "dVdx", "residual"];
    if oracle {
        columns.push("P_grid");
    }
    let mut report = Report::new("ehrenfest", config, &columns);
    report.extra.push(("seed".into(), seed.to_string()));
    for i in 0..times.len() {
        let mut row = vec![
            Value::Real(series.times[i]),
            Value::Real(series.momentum[i]),
            Value::Real(series.momentum_rate[i]),
            Value::Real(series.force[i]),
            Value::Real(series.residual[i]),
        ];
        if let Some(grid) = &series.momentum_grid {
            row.push(Value::Real(grid[i]));
        }
        report.push_row(row);
    }
    let tol = config.tolerances.symbolic;
    report.suites.push(Suite::at_most(
        "ehrenfest-residual",
        series.max_abs_residual(),
        tol,
    ));
    if let Some(dev) = series.max_oracle_deviation() {
        report
            .suites
            .push(Suite::at_most("grid-oracle", dev, config.tolerances.oracle));
    }

    let randoms = packets::random_packets(&cfg, seed, RANDOM_PACKETS, RANDOM_MAX_MODES);
    let window = packets::default_times(&cfg);
    let worst = par::try_map(&randoms, Execution::default(), |p| {
        packets::ehrenfest_report(p, &window, None, Execution::Sequential)
            .map(|r| r.max_abs_residual())
    })?
    .into_iter()
    .fold(0.0, f64::max);
    report
        .suites
        .push(Suite::at_most("random-packet-residual", worst, tol));
    Ok(report)
}
