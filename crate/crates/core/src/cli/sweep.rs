//! Random draws with equilibrium checks, one row per draw.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::config::SweepOptions;
use super::output::{fmt_f64, fmt_opt};
use crate::equilibrium::{brute_force_nash, check_fixed_point, check_lemmas, solve_nash, EquilibriumResult};
use crate::error::Result;
use crate::rng::Rng;
use crate::sampling::{default_strata, draw, stratified_draw, Instance, SampleRanges};
use crate::zones::ZoneLabel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub draw: usize,
    pub seed: u64,
    /// Requested stratum, if stratified.
    pub target: Option<ZoneLabel>,
    pub instance: Instance,
    pub equilibrium: EquilibriumResult,
    pub fixed_point_dev: f64,
    pub lemmas_ok: bool,
    /// Largest payoff gap to the brute-force oracle and its tolerance.
    pub oracle: Option<(f64, f64)>,
}

impl SweepRow {
    pub fn fixed_point_ok(&self) -> bool {
        self.fixed_point_dev <= 1e-8
    }

    pub fn oracle_ok(&self) -> bool {
        self.oracle.is_none_or(|(gap, tol)| gap <= tol)
    }

    pub fn to_record(&self) -> Vec<String> {
        let m = self.instance.params;
        let p = self.instance.prices;
        let s = self.equilibrium.profile;
        let mut r = vec![
            self.draw.to_string(),
            self.seed.to_string(),
            self.target.map(|t| t.name().to_string()).unwrap_or_default(),
            self.equilibrium.zone_tag(),
            self.instance.on_target.to_string(),
            format!("{:?}", self.instance.branch),
        ];
        r.extend(
            [m.y1, m.y2, m.q1, m.q2, m.rho, p.p1, p.p2, s.alpha, s.beta, s.gamma, s.delta]
                .into_iter()
                .chain([self.equilibrium.payoffs.0, self.equilibrium.payoffs.1, self.fixed_point_dev])
                .map(fmt_f64),
        );
        r.push(self.lemmas_ok.to_string());
        r.push(fmt_opt(self.oracle.map(|o| o.0)));
        r.push(fmt_opt(self.oracle.map(|o| o.1)));
        r
    }
}

fn is_point(r: &SampleRanges) -> bool {
    [r.y1, r.y2, r.q1, r.q2, r.rho, r.p1, r.p2].iter().all(|[lo, hi]| lo == hi)
}

/// Draw `i`. Zero-width ranges always give the same instance, so they are
/// drawn without stratification.
fn instance(opts: &SweepOptions, i: usize) -> (u64, Option<ZoneLabel>, Instance) {
    let seed = opts.seed.wrapping_add(i as u64);
    if opts.stratify && !is_point(&opts.ranges) {
        let strata = default_strata();
        let target = strata[i % strata.len()];
        (seed, Some(target), stratified_draw(opts.seed, i, &opts.ranges, &strata, opts.max_attempts))
    } else {
        (seed, None, draw(&mut Rng::new(seed), &opts.ranges))
    }
}

pub fn sweep_row(opts: &SweepOptions, i: usize) -> Result<SweepRow> {
    let (seed, target, inst) = instance(opts, i);
    let eq = solve_nash(&inst.prices, &inst.params)?;
    let fp = check_fixed_point(&eq.profile, &inst.prices, &inst.params)?;
    let lemmas_ok = check_lemmas(&eq.profile, &inst.prices, &inst.params).all();
    let oracle = if opts.oracle_grid > 0 {
        let o = brute_force_nash(&inst.prices, &inst.params, opts.oracle_grid)?;
        let gap = (o.payoffs.0 - eq.payoffs.0).abs().max((o.payoffs.1 - eq.payoffs.1).abs());
        Some((gap, o.tolerance))
    } else {
        None
    };
    Ok(SweepRow {
        draw: i,
        seed,
        target,
        instance: inst,
        equilibrium: eq,
        fixed_point_dev: fp.max_deviation,
        lemmas_ok,
        oracle,
    })
}

/// All rows, computed in parallel on the current rayon pool and returned in draw order.
pub fn run_sweep(opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    (0..opts.draws).into_par_iter().map(|i| sweep_row(opts, i)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub draws: usize,
    pub zone_counts: BTreeMap<String, usize>,
    pub off_target: usize,
    pub fixed_point_failures: usize,
    pub lemma_failures: usize,
    pub oracle_checked: usize,
    pub oracle_failures: usize,
}

pub fn summarize(rows: &[SweepRow]) -> SweepSummary {
    let mut zone_counts = BTreeMap::new();
    for r in rows {
        *zone_counts.entry(r.equilibrium.zone_tag()).or_insert(0) += 1;
    }
    SweepSummary {
        draws: rows.len(),
        zone_counts,
        off_target: rows.iter().filter(|r| r.target.is_some() && !r.instance.on_target).count(),
        fixed_point_failures: rows.iter().filter(|r| !r.fixed_point_ok()).count(),
        lemma_failures: rows.iter().filter(|r| !r.lemmas_ok).count(),
        oracle_checked: rows.iter().filter(|r| r.oracle.is_some()).count(),
        oracle_failures: rows.iter().filter(|r| !r.oracle_ok()).count(),
    }
}
