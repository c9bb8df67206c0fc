//! Mode runners: each computes its result, writes its files and returns the
//! JSON summary body.

use std::path::Path;

use serde_json::{json, Value};

use super::config::{Mode, RunConfig};
use super::output::{fmt_f64, write_portrait, write_sweep, write_trajectory, TrajectoryRow};
use super::sweep::{run_sweep, summarize};
use super::CliError;
use crate::continuous::{
    drift, integrate_with, phase_portrait, ContinuousEvent, ContinuousEventKind, SwitchLine, Terminal,
};
use crate::discrete::{iterate_with, Direction, SteadyStateClass};
use crate::equilibrium::{check_fixed_point, check_lemmas, solve_nash_any};
use crate::error::Error;
use crate::model::{ModelParams, PriceState};
use crate::stochastic::{ensemble, one_sided_drift_experiment, stationary_locus, ShockMode};
use crate::zones::{line_values, price_space_loci};

/// Result of one run before it is written out.
pub struct Outcome {
    pub result: Value,
    pub files: Vec<String>,
    /// The run finished but could not classify its outcome.
    pub unresolved: bool,
}

pub fn run(mode: Mode, cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    cfg.validate(mode)?;
    match mode {
        Mode::Equilibrium => equilibrium(cfg),
        Mode::Zones => zones(cfg, out),
        Mode::Discrete => discrete(cfg, out),
        Mode::Ode => ode(cfg, out),
        Mode::Sde => sde(cfg, out),
        Mode::Sweep => sweep(cfg, out),
    }
}

fn done(result: Value, files: Vec<String>) -> Result<Outcome, CliError> {
    Ok(Outcome { result, files, unresolved: false })
}

fn equilibrium_json(prices: &PriceState, params: &ModelParams) -> Result<Value, CliError> {
    let eq = solve_nash_any(prices, params)?;
    let s = eq.profile;
    let fp = check_fixed_point(&s, prices, params)?;
    Ok(json!({
        "zone": eq.zone.name(),
        "zone_tag": eq.zone_tag(),
        "frame": eq.frame,
        "branch": eq.branch,
        "case": eq.case,
        "kind": eq.kind,
        "boundary": eq.boundary,
        "profile": s.as_array(),
        "aggregates": eq.aggregates,
        "payoffs": [eq.payoffs.0, eq.payoffs.1],
        "fixed_point": fp,
        "lemmas": check_lemmas(&s, prices, params),
    }))
}

fn loci_json(params: &ModelParams) -> Result<Value, CliError> {
    let l = price_space_loci(params)?;
    Ok(json!({ "e_tilde": l.e_tilde(), "p1_star": l.p1_star, "p2_star": l.p2_star }))
}

fn equilibrium(cfg: &RunConfig) -> Result<Outcome, CliError> {
    done(equilibrium_json(&cfg.prices()?, &cfg.params()?)?, vec![])
}

fn portrait(cfg: &RunConfig, params: &ModelParams, out: &Path, files: &mut Vec<String>) -> Result<Option<usize>, CliError> {
    let Some(g) = cfg.portrait else { return Ok(None) };
    let points = phase_portrait(params, (g.p1[0], g.p1[1]), (g.p2[0], g.p2[1]), g.n1, g.n2)?;
    write_portrait(&out.join("portrait.csv"), &points)?;
    files.push("portrait.csv".into());
    Ok(Some(points.len()))
}

fn zones(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let (params, prices) = (cfg.params()?, cfg.prices()?);
    let eq = solve_nash_any(&prices, &params)?;
    let residuals = if prices.is_positive() { Some(line_values(&prices, &params)?) } else { None };
    let mut files = vec![];
    let rows = portrait(cfg, &params, out, &mut files)?;
    done(
        json!({
            "zone": eq.zone.name(),
            "zone_tag": eq.zone_tag(),
            "frame": eq.frame,
            "case": eq.case,
            "branch": eq.branch,
            "residuals": residuals,
            "loci": loci_json(&params)?,
            "portrait_rows": rows,
        }),
        files,
    )
}

fn discrete(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let (params, prices) = (cfg.params()?, cfg.prices()?);
    let tr = iterate_with(&prices, &params, &cfg.discrete.to_config())?;
    let rows: Vec<TrajectoryRow> = tr
        .records
        .iter()
        .map(|r| TrajectoryRow {
            t: r.t.to_string(),
            prices: r.prices,
            profile: r.equilibrium.profile,
            zone: r.equilibrium.zone_tag(),
            event: r
                .events
                .iter()
                .flatten()
                .map(|e| {
                    let d = if e.direction == Direction::Down { "down" } else { "up" };
                    format!("{d}{}", e.region)
                })
                .collect::<Vec<_>>()
                .join(";"),
        })
        .collect();
    write_trajectory(&out.join("trajectory.csv"), &rows)?;
    let last = tr.last();
    let unresolved = matches!(tr.classification, SteadyStateClass::Unresolved { .. });
    Ok(Outcome {
        result: json!({
            "classification": tr.classification,
            "converged_at": tr.converged_at,
            "steps": tr.records.len() - 1,
            "final_prices": last.prices,
            "final_zone": last.equilibrium.zone_tag(),
            "final_profile": last.equilibrium.profile.as_array(),
            "loci": loci_json(&params)?,
        }),
        files: vec!["trajectory.csv".into()],
        unresolved,
    })
}

fn line_name(l: SwitchLine) -> &'static str {
    match l {
        SwitchLine::MinusRho => "minus_rho",
        SwitchLine::PlusRho => "plus_rho",
    }
}

fn event_label(e: &ContinuousEvent) -> String {
    match e.kind {
        ContinuousEventKind::Switch { from, to } => format!("switch:{from:?}>{to:?}"),
        ContinuousEventKind::SlidingStart { line } => format!("slide_start:{}", line_name(line)),
        ContinuousEventKind::SlidingEnd { line } => format!("slide_end:{}", line_name(line)),
        ContinuousEventKind::Clipped { region } => format!("clip{region}"),
    }
}

fn ode(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let (params, prices) = (cfg.params()?, cfg.prices()?);
    let o = cfg.ode;
    let tr = integrate_with(&prices, &params, &o.to_config())?;
    let n = tr.samples.len();
    let mut rows = Vec::new();
    let mut prev_t = f64::NEG_INFINITY;
    for (i, s) in tr.samples.iter().enumerate() {
        if i % o.every != 0 && i != n - 1 {
            continue;
        }
        let eq = solve_nash_any(&s.prices, &params)?;
        let event = tr.events_between(prev_t, s.t).map(event_label).collect::<Vec<_>>().join(";");
        prev_t = s.t;
        rows.push(TrajectoryRow { t: fmt_f64(s.t), prices: s.prices, profile: eq.profile, zone: eq.zone_tag(), event });
    }
    let mut files = vec!["trajectory.csv".to_string()];
    write_trajectory(&out.join("trajectory.csv"), &rows)?;
    let portrait_rows = portrait(cfg, &params, out, &mut files)?;
    let last = tr.last();
    let f = drift(&last.prices, &params)?;
    done(
        json!({
            "terminal": match tr.terminal { Terminal::Stationary { t } => json!({"stationary_at": t}), Terminal::Horizon => json!("horizon") },
            "final_t": last.t,
            "final_prices": last.prices,
            "final_kind": last.kind,
            "final_sliding": last.sliding,
            "final_field": f,
            "events": tr.events.len(),
            "loci": loci_json(&params)?,
            "portrait_rows": portrait_rows,
        }),
        files,
    )
}

fn sde(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let (params, prices) = (cfg.params()?, cfg.prices()?);
    let s = cfg.sde;
    let noise = s.noise();
    let paths = ensemble(&prices, &params, &noise, s.dt, s.horizon, s.paths)?;
    let first = &paths[0];
    let mut rows = Vec::new();
    let mut prev_t = f64::NEG_INFINITY;
    let n = first.samples.len();
    for (i, smp) in first.samples.iter().enumerate() {
        if i % s.every != 0 && i != n - 1 {
            continue;
        }
        let eq = solve_nash_any(&smp.prices, &params)?;
        let event = first
            .reflections
            .iter()
            .filter(|r| r.t > prev_t && r.t <= smp.t)
            .map(|r| format!("reflect{}", r.region))
            .collect::<Vec<_>>()
            .join(";");
        prev_t = smp.t;
        rows.push(TrajectoryRow { t: fmt_f64(smp.t), prices: smp.prices, profile: eq.profile, zone: eq.zone_tag(), event });
    }
    write_trajectory(&out.join("trajectory.csv"), &rows)?;

    let locus = stationary_locus(&params, 2000)?;
    let mut per_path = Vec::with_capacity(paths.len());
    for (i, p) in paths.iter().enumerate() {
        let seed = s.seed.wrapping_add(i as u64);
        let drift = if s.shock_mode == ShockMode::Symmetric {
            None
        } else {
            Some(one_sided_drift_experiment(&prices, &params, &noise.with_seed(seed), s.dt, s.horizon)?)
        };
        per_path.push(json!({
            "seed": seed,
            "final_prices": p.last().prices,
            "max_locus_distance": p.max_locus_distance(&locus),
            "reflections": p.reflections.len(),
            "drift": drift,
        }));
    }
    done(
        json!({ "paths": per_path, "loci": loci_json(&params)?, "start_on_locus": locus.project(&prices) }),
        vec!["trajectory.csv".into()],
    )
}

fn sweep(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let rows = run_sweep(&cfg.sweep)?;
    let records: Vec<Vec<String>> = rows.iter().map(|r| r.to_record()).collect();
    write_sweep(&out.join("sweep.csv"), &records)?;
    done(serde_json::to_value(summarize(&rows)).map_err(|e| CliError::Io(e.to_string()))?, vec!["sweep.csv".into()])
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => CliError::Config(m),
            other => CliError::Model(other),
        }
    }
}
