//! Parameters, prices, strategy profiles and the aggregate quantities of the
//! two-region economy.
//!
//! Region 1 supplies `q1` units of its good and consumer I holds income `Y1`;
//! region 2 likewise with `q2` and `Y2`. Importing a unit costs the local
//! price plus the transport cost `rho`. Consumer I orders `alpha` units at
//! home and `beta` abroad, consumer II orders `gamma` abroad and `delta` at
//! home. Local orders are served first.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for every boundary comparison in the crate.
pub const EPS: f64 = 1e-9;

/// Exogenous data of the economy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub y1: f64,
    pub y2: f64,
    pub q1: f64,
    pub q2: f64,
    pub rho: f64,
}

impl ModelParams {
    pub fn new(y1: f64, y2: f64, q1: f64, q2: f64, rho: f64) -> Result<Self> {
        let p = Self { y1, y2, q1, q2, rho };
        p.validate()?;
        Ok(p)
    }

    /// All five values must be finite and strictly positive.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("y1", self.y1),
            ("y2", self.y2),
            ("q1", self.q1),
            ("q2", self.q2),
            ("rho", self.rho),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Same economy with the two regions relabelled.
    pub fn swapped(&self) -> Self {
        Self { y1: self.y2, y2: self.y1, q1: self.q2, q2: self.q1, rho: self.rho }
    }

    /// Stationary prices of zone III, `(Y1/q1, Y2/q2)`.
    pub fn e_tilde(&self) -> PriceState {
        PriceState { p1: self.y1 / self.q1, p2: self.y2 / self.q2 }
    }
}

/// Local prices of the two goods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceState {
    pub p1: f64,
    pub p2: f64,
}

impl PriceState {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        let p = Self { p1, p2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p1.is_finite() && self.p2.is_finite() && self.p1 >= 0.0 && self.p2 >= 0.0) {
            return Err(Error::Domain(format!("prices must be finite and >= 0, got ({}, {})", self.p1, self.p2)));
        }
        Ok(())
    }

    /// Import price of good 1, `p1 + rho`.
    pub fn p1_import(&self, params: &ModelParams) -> f64 {
        self.p1 + params.rho
    }

    /// Import price of good 2, `p2 + rho`.
    pub fn p2_import(&self, params: &ModelParams) -> f64 {
        self.p2 + params.rho
    }

    pub fn swapped(&self) -> Self {
        Self { p1: self.p2, p2: self.p1 }
    }

    pub fn is_positive(&self) -> bool {
        self.p1 > 0.0 && self.p2 > 0.0
    }

    pub fn distance(&self, other: &PriceState) -> f64 {
        (self.p1 - other.p1).hypot(self.p2 - other.p2)
    }
}

/// Orders `(alpha, beta)` of consumer I and `(gamma, delta)` of consumer II.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl StrategyProfile {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self { alpha, beta, gamma, delta }
    }

    /// Profile seen from the relabelled economy: consumer II becomes consumer I.
    pub fn swapped(&self) -> Self {
        Self { alpha: self.delta, beta: self.gamma, gamma: self.beta, delta: self.alpha }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    pub fn max_abs_diff(&self, other: &StrategyProfile) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Quantities consumed and incomes spent or left at a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub q1_cons: f64,
    pub q2_cons: f64,
    pub y1_res: f64,
    pub y2_res: f64,
    pub y1_cons: f64,
    pub y2_cons: f64,
}

impl Aggregates {
    pub fn swapped(&self) -> Self {
        Self {
            q1_cons: self.q2_cons,
            q2_cons: self.q1_cons,
            y1_res: self.y2_res,
            y2_res: self.y1_res,
            y1_cons: self.y2_cons,
            y2_cons: self.y1_cons,
        }
    }

    /// Income left unspent by consumers I and II.
    pub fn unspent(&self, params: &ModelParams) -> (f64, f64) {
        (params.y1 - self.y1_cons, params.y2 - self.y2_cons)
    }
}

/// Demand and supply totals expressed in units of each good.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremAggregates {
    /// Region 1 supply.
    pub rls1: f64,
    /// Region 2 supply.
    pub rls2: f64,
    /// Units of good 1 affordable with both incomes.
    pub trfr1: f64,
    /// Units of good 2 affordable with both incomes.
    pub trfr2: f64,
    /// Total supply valued in units of good 1 as seen by consumer II.
    pub t1: f64,
    /// Total supply valued in units of good 2 as seen by consumer I.
    pub t2: f64,
}

/// Budget feasibility of both consumers, up to [`EPS`] in money.
pub fn feasible(profile: &StrategyProfile, prices: &PriceState, params: &ModelParams) -> bool {
    let s = profile;
    if s.as_array().iter().any(|v| !v.is_finite() || *v < -EPS) {
        return false;
    }
    let spend1 = s.alpha * prices.p1 + s.beta * prices.p2_import(params);
    let spend2 = s.gamma * prices.p1_import(params) + s.delta * prices.p2;
    spend1 <= params.y1 + EPS && spend2 <= params.y2 + EPS
}

/// Units received by consumer I.
pub fn payoff1(profile: &StrategyProfile, params: &ModelParams) -> f64 {
    let left2 = (params.q2 - profile.delta).max(0.0);
    profile.alpha.min(params.q1) + profile.beta.min(left2)
}

/// Units received by consumer II.
pub fn payoff2(profile: &StrategyProfile, params: &ModelParams) -> f64 {
    let left1 = (params.q1 - profile.alpha).max(0.0);
    profile.delta.min(params.q2) + profile.gamma.min(left1)
}

/// Consumption and income aggregates of a feasible profile.
///
/// Consumption counts what is actually delivered, so it never exceeds supply.
/// A good sold at price zero is fully disposed of and counts as consumed.
pub fn aggregates(profile: &StrategyProfile, prices: &PriceState, params: &ModelParams) -> Result<Aggregates> {
    params.validate()?;
    prices.validate()?;
    if !feasible(profile, prices, params) {
        return Err(Error::InfeasibleProfile);
    }
    Ok(aggregates_unchecked(profile, prices, params))
}

pub(crate) fn aggregates_unchecked(profile: &StrategyProfile, prices: &PriceState, params: &ModelParams) -> Aggregates {
    let s = profile;
    let p1i = prices.p1_import(params);
    let p2i = prices.p2_import(params);
    let q1_cons = if prices.p1 == 0.0 { params.q1 } else { (s.alpha + s.gamma).min(params.q1) };
    let q2_cons = if prices.p2 == 0.0 { params.q2 } else { (s.beta + s.delta).min(params.q2) };
    Aggregates {
        q1_cons,
        q2_cons,
        y1_res: params.y1 - p2i * s.beta,
        y2_res: params.y2 - p1i * s.gamma,
        y1_cons: prices.p1 * s.alpha + p2i * s.beta,
        y2_cons: p1i * s.gamma + prices.p2 * s.delta,
    }
}

/// Supply and purchasing-power totals; requires both prices positive.
pub fn theorem_aggregates(prices: &PriceState, params: &ModelParams) -> Result<TheoremAggregates> {
    params.validate()?;
    prices.validate()?;
    if !prices.is_positive() {
        return Err(Error::DegeneratePrice);
    }
    let (p1, p2) = (prices.p1, prices.p2);
    let (p1i, p2i) = (prices.p1_import(params), prices.p2_import(params));
    Ok(TheoremAggregates {
        rls1: params.q1,
        rls2: params.q2,
        trfr1: params.y1 / p1 + params.y2 / p1i,
        trfr2: params.y1 / p2i + params.y2 / p2,
        t1: params.q1 + p2 * params.q2 / p1i,
        t2: p1 * params.q1 / p2i + params.q2,
    })
}

/// Relabel regions: incomes, supplies and prices are exchanged.
pub fn swap_regions(params: &ModelParams, prices: &PriceState) -> (ModelParams, PriceState) {
    (params.swapped(), prices.swapped())
}
