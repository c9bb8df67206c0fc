//! End-to-end runs of the `bitrade` binary.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

use bitrade::{solve_nash, ModelParams, PriceState};

const PARAMS: &str = "[params]\ny1 = 2.0\ny2 = 4.0\nq1 = 2.0\nq2 = 3.0\nrho = 0.5\n";

struct Run {
    code: i32,
    out: PathBuf,
    stderr: String,
    _dir: TempDir,
}

impl Run {
    fn summary(&self) -> Value {
        serde_json::from_str(&std::fs::read_to_string(self.out.join("summary.json")).unwrap()).unwrap()
    }

    fn file(&self, name: &str) -> String {
        std::fs::read_to_string(self.out.join(name)).unwrap()
    }
}

fn run_with(mode: &str, config: &str, extra: &[&str], env: &[(&str, &str)]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bitrade"));
    cmd.arg(mode).arg("--config").arg(&cfg).arg("--out").arg(&out).args(extra);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let o = cmd.output().unwrap();
    Run { code: o.status.code().unwrap(), out, stderr: String::from_utf8_lossy(&o.stderr).into(), _dir: dir }
}

fn run(mode: &str, config: &str) -> Run {
    run_with(mode, config, &[], &[])
}

fn shipped(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn header(csv: &str) -> String {
    format!("{}\n", csv.lines().next().unwrap())
}

#[test]
fn equilibrium_mode_reports_autarky() {
    let r = run("equilibrium", &shipped("equilibrium.toml"));
    assert_eq!(r.code, 0, "{}", r.stderr);
    let s = r.summary();
    assert_eq!(s["mode"], "equilibrium");
    assert_eq!(s["result"]["zone"], "III");
    assert_eq!(s["result"]["profile"], serde_json::json!([2.0, 0.0, 0.0, 3.0]));
    assert_eq!(s["result"]["fixed_point"]["ok"], true);
    assert_eq!(s["unresolved"], false);
}

#[test]
fn discrete_mode_writes_trajectory() {
    let r = run("discrete", &shipped("discrete.toml"));
    assert_eq!(r.code, 0, "{}", r.stderr);
    let csv = r.file("trajectory.csv");
    assert_eq!(header(&csv), golden("trajectory_header.csv"));
    let s = r.summary();
    assert_eq!(s["result"]["classification"]["class"], "DegenerateL4");
    let k = s["result"]["classification"]["k"].as_f64().unwrap();
    assert!((k - (12f64.sqrt() + 2.0) / 4.0).abs() < 1e-12);
    // Step indices are integers starting at zero; the first step lowers p1.
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert!(rows[0].starts_with("0,"));
    assert!(rows[0].ends_with(",down1"));
    assert_eq!(rows.len(), s["result"]["steps"].as_u64().unwrap() as usize + 1);
}

#[test]
fn ode_mode_writes_trajectory_and_portrait() {
    let cfg = shipped("ode.toml").replace("horizon = 20.0", "horizon = 2.0").replace("n1 = 50", "n1 = 4").replace("n2 = 50", "n2 = 3");
    let r = run("ode", &cfg);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(header(&r.file("trajectory.csv")), golden("trajectory_header.csv"));
    let portrait = r.file("portrait.csv");
    assert_eq!(header(&portrait), golden("portrait_header.csv"));
    assert_eq!(portrait.lines().count(), 1 + 12);
    let s = r.summary();
    assert_eq!(s["files"], serde_json::json!(["trajectory.csv", "portrait.csv"]));
    assert_eq!(s["result"]["portrait_rows"], 12);
    let last_t: f64 = r.file("trajectory.csv").lines().last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((last_t - 2.0).abs() < 1e-12);
}

#[test]
fn sde_mode_is_reproducible_per_seed() {
    let cfg = shipped("sde.toml").replace("paths = 20", "paths = 3").replace("horizon = 10.0", "horizon = 2.0");
    let a = run("sde", &cfg);
    let b = run("sde", &cfg);
    let c = run_with("sde", &cfg, &["--seed", "9"], &[]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.file("trajectory.csv"), b.file("trajectory.csv"));
    assert_eq!(a.file("summary.json"), b.file("summary.json"));
    assert_ne!(a.file("trajectory.csv"), c.file("trajectory.csv"));
    let s = c.summary();
    assert_eq!(s["config"]["sde"]["seed"], 9);
    let paths = s["result"]["paths"].as_array().unwrap();
    assert_eq!(paths.len(), 3);
    assert_eq!(paths[2]["seed"], 11);
    assert!(paths[0]["drift"]["locus_drift"].is_number());
}

#[test]
fn zones_mode_reports_residuals() {
    let cfg = format!("{PARAMS}[initial_prices]\np1 = 2.0\np2 = 1.0\n");
    let r = run("zones", &cfg);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let s = r.summary();
    assert_eq!(s["result"]["zone"], "II_2");
    assert!(s["result"]["residuals"]["a1"].as_f64().unwrap() < 0.0);
    assert!(s["result"]["portrait_rows"].is_null());
}

fn sweep_cfg(draws: usize, seed: u64, extra: &str) -> String {
    format!("[sweep]\ndraws = {draws}\nseed = {seed}\noracle_grid = 30\n{extra}")
}

#[test]
fn sweep_rows_revalidate() {
    let r = run("sweep", &sweep_cfg(140, 5, ""));
    assert_eq!(r.code, 0, "{}", r.stderr);
    let s = r.summary();
    assert_eq!(s["result"]["draws"], 140);
    assert_eq!(s["result"]["oracle_failures"], 0);
    assert_eq!(s["result"]["fixed_point_failures"], 0);
    let csv = r.file("sweep.csv");
    assert_eq!(header(&csv), golden("sweep_header.csv"));
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let mut n = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let f = |name: &str| rec[col(name)].parse::<f64>().unwrap();
        let m = ModelParams::new(f("y1"), f("y2"), f("q1"), f("q2"), f("rho")).unwrap();
        let p = PriceState::new(f("p1"), f("p2")).unwrap();
        let eq = solve_nash(&p, &m).unwrap();
        assert_eq!(eq.profile.as_array(), [f("alpha"), f("beta"), f("gamma"), f("delta")]);
        assert_eq!(eq.zone_tag(), &rec[col("zone")]);
        assert_eq!(&rec[col("draw")], n.to_string());
        n += 1;
    }
    assert_eq!(n, 140);
}

#[test]
fn sweep_is_byte_identical_across_runs_and_thread_counts() {
    let cfg = sweep_cfg(60, 3, "");
    let a = run_with("sweep", &cfg, &[], &[("BITRADE_THREADS", "1")]);
    let b = run_with("sweep", &cfg, &[], &[("BITRADE_THREADS", "4")]);
    let c = run("sweep", &cfg);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.file("sweep.csv"), b.file("sweep.csv"));
    assert_eq!(a.file("sweep.csv"), c.file("sweep.csv"));
    let d = run_with("sweep", &cfg, &["--seed", "4"], &[]);
    assert_ne!(a.file("sweep.csv"), d.file("sweep.csv"));
}

#[test]
fn zero_width_ranges_repeat_one_instance() {
    let ranges = "[sweep.ranges]\ny1 = [2.0, 2.0]\ny2 = [4.0, 4.0]\nq1 = [2.0, 2.0]\nq2 = [3.0, 3.0]\nrho = [0.5, 0.5]\np1 = [2.0, 2.0]\np2 = [1.0, 1.0]\n";
    let r = run("sweep", &sweep_cfg(5, 1, ranges));
    assert_eq!(r.code, 0, "{}", r.stderr);
    let csv = r.file("sweep.csv");
    let bodies: Vec<String> = csv.lines().skip(1).map(|l| l.splitn(3, ',').nth(2).unwrap().to_string()).collect();
    assert_eq!(bodies.len(), 5);
    assert!(bodies.iter().all(|b| b == &bodies[0]));
    assert!(bodies[0].starts_with(",II_2,"));
}

#[test]
fn configuration_errors_exit_with_two() {
    let r = run("equilibrium", &format!("{PARAMS}[initial_prices]\np1 = 1.0\np2 = 1.0\nbogus = 1\n"));
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("bogus"), "{}", r.stderr);
    let r = run("equilibrium", "[params]\ny1 = 2.0\ny2 = 4.0\nq1 = -2.0\nq2 = 3.0\nrho = 0.5\n[initial_prices]\np1 = 1.0\np2 = 1.0\n");
    assert_eq!(r.code, 2);
    let r = run("discrete", PARAMS);
    assert_eq!(r.code, 2, "missing prices");
    let r = run("sweep", "[sweep]\ndraws = 0\n");
    assert_eq!(r.code, 2);
    let r = run("sweep", "not toml at all [");
    assert_eq!(r.code, 2);
}

#[test]
fn orientation_violation_exits_with_three() {
    let r = run("discrete", &format!("{PARAMS}[initial_prices]\np1 = 4.0\np2 = 6.0\n"));
    assert_eq!(r.code, 3, "{}", r.stderr);
    assert!(r.stderr.contains("orientation"));
    // Relabelling on the fly is allowed when asked for.
    let r = run("discrete", &format!("{PARAMS}[initial_prices]\np1 = 4.0\np2 = 6.0\n[discrete]\nenforce_orientation = false\n"));
    assert_eq!(r.code, 0, "{}", r.stderr);
}

#[test]
fn unresolved_outcome_exits_with_four() {
    let r = run("discrete", &format!("{PARAMS}[initial_prices]\np1 = 0.5\np2 = 0.5\n[discrete]\nmax_steps = 0\n"));
    assert_eq!(r.code, 4, "{}", r.stderr);
    let s = r.summary();
    assert_eq!(s["unresolved"], true);
    assert_eq!(s["result"]["classification"]["class"], "Unresolved");
}

#[test]
fn summary_records_schema_and_version() {
    let r = run("equilibrium", &shipped("equilibrium.toml"));
    let s = r.summary();
    assert_eq!(s["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(s["csv_schema"]["version"], 1);
    let cols: Vec<&str> = s["csv_schema"]["sweep"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(format!("{}\n", cols.join(",")), golden("sweep_header.csv"));
}
