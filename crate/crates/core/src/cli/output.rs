//! File formats written by the command-line runner.
//!
//! Floats in CSV files use `{:.16e}`, i.e. 17 significant digits, which
//! round-trips every `f64`. Column sets are fixed per schema version.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::CliError;
use crate::continuous::PortraitPoint;
use crate::model::{PriceState, StrategyProfile};

pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const TRAJECTORY_HEADER: [&str; 9] = ["t", "p1", "p2", "alpha", "beta", "gamma", "delta", "zone", "event"];
pub const PORTRAIT_HEADER: [&str; 5] = ["p1", "p2", "f1", "f2", "zone"];
pub const SWEEP_HEADER: [&str; 23] = [
    "draw",
    "seed",
    "target",
    "zone",
    "on_target",
    "branch",
    "y1",
    "y2",
    "q1",
    "q2",
    "rho",
    "p1",
    "p2",
    "alpha",
    "beta",
    "gamma",
    "delta",
    "payoff1",
    "payoff2",
    "fixed_point_dev",
    "lemmas_ok",
    "oracle_gap",
    "oracle_tol",
];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Float column that may be absent.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Column names of every CSV file, for the JSON summary.
pub fn schema_json() -> serde_json::Value {
    serde_json::json!({
        "version": CSV_SCHEMA_VERSION,
        "trajectory": TRAJECTORY_HEADER,
        "portrait": PORTRAIT_HEADER,
        "sweep": SWEEP_HEADER,
    })
}

pub struct TrajectoryRow {
    /// Already formatted: a step index or a time.
    pub t: String,
    pub prices: PriceState,
    pub profile: StrategyProfile,
    pub zone: String,
    pub event: String,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>, CliError> {
    csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_trajectory(path: &Path, rows: &[TrajectoryRow]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(TRAJECTORY_HEADER).map_err(&err)?;
    for r in rows {
        let s = r.profile;
        w.write_record([
            r.t.clone(),
            fmt_f64(r.prices.p1),
            fmt_f64(r.prices.p2),
            fmt_f64(s.alpha),
            fmt_f64(s.beta),
            fmt_f64(s.gamma),
            fmt_f64(s.delta),
            r.zone.clone(),
            r.event.clone(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_portrait(path: &Path, points: &[PortraitPoint]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(PORTRAIT_HEADER).map_err(&err)?;
    for p in points {
        w.write_record([fmt_f64(p.prices.p1), fmt_f64(p.prices.p2), fmt_f64(p.f[0]), fmt_f64(p.f[1]), p.zone.clone()])
            .map_err(&err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// Rows are already formatted, in `SWEEP_HEADER` order.
pub fn write_sweep(path: &Path, rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(SWEEP_HEADER).map_err(&err)?;
    for r in rows {
        w.write_record(r).map_err(&err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::Io(e.to_string()))
}
