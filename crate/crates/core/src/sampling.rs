//! Random model instances, optionally stratified by zone label.
//!
//! Draws are canonicalised: when `p2 q2 > p1 q1` the regions are exchanged
//! so that every instance can be fed to the canonical solver.

use serde::{Deserialize, Serialize};

use crate::model::{ModelParams, PriceState, EPS};
use crate::rng::Rng;
use crate::zones::{classify_degenerate, classify_resolved, delta_p_branch, DeltaPBranch, ZoneLabel};

/// Closed sampling ranges for each quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleRanges {
    pub y1: [f64; 2],
    pub y2: [f64; 2],
    pub q1: [f64; 2],
    pub q2: [f64; 2],
    pub rho: [f64; 2],
    pub p1: [f64; 2],
    pub p2: [f64; 2],
}

impl Default for SampleRanges {
    fn default() -> Self {
        Self {
            y1: [0.5, 10.0],
            y2: [0.5, 10.0],
            q1: [0.5, 5.0],
            q2: [0.5, 5.0],
            rho: [0.05, 2.0],
            p1: [0.05, 5.0],
            p2: [0.05, 5.0],
        }
    }
}

impl SampleRanges {
    pub fn validate(&self) -> Result<(), String> {
        for (name, [lo, hi]) in [
            ("y1", self.y1),
            ("y2", self.y2),
            ("q1", self.q1),
            ("q2", self.q2),
            ("rho", self.rho),
            ("p1", self.p1),
            ("p2", self.p2),
        ] {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
                return Err(format!("range {name} must satisfy 0 < lo <= hi, got [{lo}, {hi}]"));
            }
        }
        Ok(())
    }
}

/// One sampled economy and price state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub params: ModelParams,
    pub prices: PriceState,
    pub zone: ZoneLabel,
    pub branch: DeltaPBranch,
    /// Whether the label matches the requested stratum.
    pub on_target: bool,
}

fn draw_raw(rng: &mut Rng, r: &SampleRanges, free_good2: bool) -> (ModelParams, PriceState) {
    let mut u = |[lo, hi]: [f64; 2]| rng.range(lo, hi);
    let params = ModelParams { y1: u(r.y1), y2: u(r.y2), q1: u(r.q1), q2: u(r.q2), rho: u(r.rho) };
    let p1 = u(r.p1);
    let p2 = u(r.p2);
    if free_good2 {
        return (params, PriceState { p1, p2: 0.0 });
    }
    let prices = PriceState { p1, p2 };
    if p2 * params.q2 > p1 * params.q1 + EPS {
        (params.swapped(), prices.swapped())
    } else {
        (params, prices)
    }
}

fn label(params: &ModelParams, prices: &PriceState) -> ZoneLabel {
    if prices.p2 == 0.0 {
        classify_degenerate(prices, params).expect("sampled p1 > 0")
    } else {
        match classify_resolved(prices, params) {
            Ok((z, false)) => z,
            Ok((_, true)) => ZoneLabel::Boundary(crate::zones::BoundaryDetail::OrientationTie),
            Err(_) => unreachable!("draws are canonicalised"),
        }
    }
}

/// Unstratified canonical draw.
pub fn draw(rng: &mut Rng, ranges: &SampleRanges) -> Instance {
    let (params, prices) = draw_raw(rng, ranges, false);
    let zone = label(&params, &prices);
    Instance { params, prices, zone, branch: delta_p_branch(&prices, &params), on_target: true }
}

/// Draw until the label equals `target`, giving up after `max_attempts`.
///
/// A `DegenerateII1` target samples `p2 = 0`. On failure the first draw is
/// returned with `on_target = false`.
pub fn draw_targeted(rng: &mut Rng, ranges: &SampleRanges, target: ZoneLabel, max_attempts: usize) -> Instance {
    let free = target == ZoneLabel::DegenerateII1;
    let mut first = None;
    for _ in 0..max_attempts.max(1) {
        let (params, prices) = draw_raw(rng, ranges, free);
        let zone = label(&params, &prices);
        let inst = Instance { params, prices, zone, branch: delta_p_branch(&prices, &params), on_target: zone == target };
        if inst.on_target {
            return inst;
        }
        first.get_or_insert(inst);
    }
    first.expect("at least one attempt")
}

/// Strata used by default: all regular labels plus the `p2 = 0` case.
pub fn default_strata() -> Vec<ZoneLabel> {
    let mut v = ZoneLabel::REGULAR.to_vec();
    v.push(ZoneLabel::DegenerateII1);
    v
}

/// Draw `i` of a stratified sample: targets `strata[i % len]` with its own
/// stream seeded by `seed + i`, so draws are reproducible independently.
pub fn stratified_draw(seed: u64, i: usize, ranges: &SampleRanges, strata: &[ZoneLabel], max_attempts: usize) -> Instance {
    let mut rng = Rng::new(seed.wrapping_add(i as u64));
    let target = strata[i % strata.len()];
    draw_targeted(&mut rng, ranges, target, max_attempts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_stratum_is_reachable() {
        let strata = default_strata();
        let r = SampleRanges::default();
        for i in 0..strata.len() * 3 {
            let inst = stratified_draw(11, i, &r, &strata, 20_000);
            assert!(inst.on_target, "stratum {:?} not reached", strata[i % strata.len()]);
        }
    }

    #[test]
    fn reproducible() {
        let strata = default_strata();
        let r = SampleRanges::default();
        assert_eq!(stratified_draw(5, 17, &r, &strata, 1000), stratified_draw(5, 17, &r, &strata, 1000));
    }

    #[test]
    fn empty_ranges_fall_back() {
        let r = SampleRanges { p1: [1.0, 1.0], p2: [1.0, 1.0], y1: [9.0, 9.0], y2: [9.0, 9.0], ..Default::default() };
        let mut rng = Rng::new(1);
        let inst = draw_targeted(&mut rng, &r, ZoneLabel::I3, 10);
        assert!(!inst.on_target);
    }
}
