//! Closed-form Nash equilibria of the ordering game.
//!
//! At positive prices the equilibrium profile depends only on the income
//! zone and on the position of `p1 - p2` relative to `rho`. Every table entry
//! is one of ten formula families, [`NeKind`]; the zone and branch merely
//! select which one applies.

use serde::{Deserialize, Serialize};

use crate::equilibrium::best_reply::{best_reply_1, best_reply_2};
use crate::error::{Error, Result};
use crate::model::{aggregates_unchecked, payoff1, payoff2, Aggregates, ModelParams, PriceState, StrategyProfile, EPS};
use crate::zones::{
    case_relation, classify_degenerate, classify_resolved, delta_p_branch, residuals, BoundaryDetail, CaseRelation,
    DeltaPBranch, ZoneLabel,
};

/// Formula family of an equilibrium profile.
///
/// Names describe who trades: `Ii*` families have consumer II importing good 1,
/// `Iv*` families have consumer I importing good 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NeKind {
    /// No trade, both supplies consumed at home: `(q1, 0, 0, q2)`.
    Autarky,
    /// No trade, both incomes spent at home: `(Y1/p1, 0, 0, Y2/p2)`.
    HomeSpending,
    /// `(Y1/p1, 0, q1 - Y1/p1, q2)`.
    IiRemainder,
    /// `(Y1/p1, 0, (Y2 - p2 q2)/p1', q2)`.
    IiResidual,
    /// `(Y1/p1, 0, q1 - Y1/p1, (Y2 - p1'(q1 - Y1/p1))/p2)`.
    IiFill,
    /// `(Y1/p1, 0, Y2/p1', 0)`.
    IiAllImport,
    /// `(q1, q2 - Y2/p2, 0, Y2/p2)`.
    IvRemainder,
    /// `(q1, (Y1 - p1 q1)/p2', 0, Y2/p2)`.
    IvResidual,
    /// `((Y1 - p2'(q2 - Y2/p2))/p1, q2 - Y2/p2, 0, Y2/p2)`.
    IvFill,
    /// `(0, Y1/p2', 0, Y2/p2)`.
    IvAllImport,
    /// `p2 = 0`: good 2 is free and fully taken by consumer II.
    FreeGood2,
    /// `p1 = 0`: good 1 is free and fully taken by consumer I.
    FreeGood1,
}

impl NeKind {
    /// Family after exchanging the regions.
    pub fn swapped(self) -> Self {
        use NeKind::*;
        match self {
            Autarky => Autarky,
            HomeSpending => HomeSpending,
            IiRemainder => IvRemainder,
            IiResidual => IvResidual,
            IiFill => IvFill,
            IiAllImport => IvAllImport,
            IvRemainder => IiRemainder,
            IvResidual => IiResidual,
            IvFill => IiFill,
            IvAllImport => IiAllImport,
            FreeGood2 => FreeGood1,
            FreeGood1 => FreeGood2,
        }
    }

    /// Evaluate the family's formula. Defined wherever the divisions are.
    pub fn profile(self, prices: &PriceState, params: &ModelParams) -> StrategyProfile {
        use NeKind::*;
        let ModelParams { y1, y2, q1, q2, .. } = *params;
        let (p1, p2) = (prices.p1, prices.p2);
        let (p1i, p2i) = (prices.p1_import(params), prices.p2_import(params));
        let s = StrategyProfile::new;
        match self {
            Autarky => s(q1, 0.0, 0.0, q2),
            HomeSpending => s(y1 / p1, 0.0, 0.0, y2 / p2),
            IiRemainder => s(y1 / p1, 0.0, q1 - y1 / p1, q2),
            IiResidual => s(y1 / p1, 0.0, (y2 - p2 * q2) / p1i, q2),
            IiFill => {
                let g = q1 - y1 / p1;
                s(y1 / p1, 0.0, g, (y2 - p1i * g) / p2)
            }
            IiAllImport => s(y1 / p1, 0.0, y2 / p1i, 0.0),
            IvRemainder => s(q1, q2 - y2 / p2, 0.0, y2 / p2),
            IvResidual => s(q1, (y1 - p1 * q1) / p2i, 0.0, y2 / p2),
            IvFill => {
                let b = q2 - y2 / p2;
                s((y1 - p2i * b) / p1, b, 0.0, y2 / p2)
            }
            IvAllImport => s(0.0, y1 / p2i, 0.0, y2 / p2),
            FreeGood2 => {
                let alpha = q1.min(y1 / p1);
                let gamma = (q1 - alpha).max(0.0).min(y2 / p1i);
                s(alpha, 0.0, gamma, q2)
            }
            FreeGood1 => {
                let delta = q2.min(y2 / p2);
                let beta = (q2 - delta).max(0.0).min(y1 / p2i);
                s(q1, beta, 0.0, delta)
            }
        }
    }
}

/// Formula family for a canonical zone label and price branch.
///
/// `above_l2` tells whether incomes lie on or above l2. It matters only in
/// zone IV-2 with `p1 - p2 > rho`: when `p2' q2 > p1 q1` part of that zone lies
/// below l2, consumer I cannot buy all of good 2 that is left and spends
/// the whole income on imports.
pub fn ne_kind(zone: ZoneLabel, branch: DeltaPBranch, above_l2: bool) -> Option<NeKind> {
    use DeltaPBranch::*;
    use NeKind::*;
    use ZoneLabel as Z;
    let lt = branch == LtMinusRho;
    let gt = branch == GtPlusRho;
    // (below -rho, strip, above rho)
    let by_branch = |below: NeKind, strip: NeKind, above: NeKind| {
        if lt {
            below
        } else if gt {
            above
        } else {
            strip
        }
    };
    Some(match zone {
        Z::III => Autarky,
        Z::II3 => IiRemainder,
        Z::II2 => {
            if lt {
                IiFill
            } else {
                IiResidual
            }
        }
        Z::II1 => {
            if lt {
                IiAllImport
            } else {
                IiResidual
            }
        }
        Z::I1 | Z::Z1_4 => by_branch(IiFill, HomeSpending, IvFill),
        Z::I2 | Z::Z1_3 => by_branch(IiAllImport, HomeSpending, IvFill),
        Z::I3 | Z::Z1_1 => by_branch(IiAllImport, HomeSpending, IvAllImport),
        Z::Z1_2 => by_branch(IiFill, HomeSpending, IvAllImport),
        Z::IV1 => IvRemainder,
        Z::IV2 => {
            if gt && !above_l2 {
                IvAllImport
            } else if gt {
                IvFill
            } else {
                IvResidual
            }
        }
        Z::DegenerateII1 => FreeGood2,
        Z::Boundary(_) => return None,
    })
}

/// Table entry for a canonical zone label and branch, evaluated at `prices`.
pub fn closed_form_profile(
    zone: ZoneLabel,
    branch: DeltaPBranch,
    prices: &PriceState,
    params: &ModelParams,
) -> Option<StrategyProfile> {
    let above_l2 = !prices.is_positive() || residuals(prices, params).l2 >= -EPS;
    ne_kind(zone, branch, above_l2).map(|k| k.profile(prices, params))
}

/// Labelling frame in which the tables were applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Frame {
    Canonical,
    /// Regions were exchanged; `zone` refers to the relabelled economy.
    Swapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub profile: StrategyProfile,
    pub aggregates: Aggregates,
    /// Payoffs of consumers I and II.
    pub payoffs: (f64, f64),
    /// Zone label in `frame`.
    pub zone: ZoneLabel,
    /// Branch of `p1 - p2` in the caller's labelling.
    pub branch: DeltaPBranch,
    /// Case relation in `frame`.
    pub case: Option<CaseRelation>,
    pub frame: Frame,
    /// Formula family in the caller's labelling.
    pub kind: NeKind,
    /// Set when the state sits on a boundary that was resolved by convention.
    pub boundary: Option<BoundaryDetail>,
}

impl EquilibriumResult {
    fn build(
        kind: NeKind,
        zone: ZoneLabel,
        case: Option<CaseRelation>,
        boundary: Option<BoundaryDetail>,
        prices: &PriceState,
        params: &ModelParams,
    ) -> Self {
        let profile = kind.profile(prices, params);
        Self {
            profile,
            aggregates: aggregates_unchecked(&profile, prices, params),
            payoffs: (payoff1(&profile, params), payoff2(&profile, params)),
            zone,
            branch: delta_p_branch(prices, params),
            case,
            frame: Frame::Canonical,
            kind,
            boundary,
        }
    }

    /// Express a result computed in the relabelled economy in the caller's labels.
    fn unswap(mut self) -> Self {
        self.profile = self.profile.swapped();
        self.aggregates = self.aggregates.swapped();
        self.payoffs = (self.payoffs.1, self.payoffs.0);
        self.branch = self.branch.swapped();
        self.kind = self.kind.swapped();
        self.frame = Frame::Swapped;
        self
    }

    /// Same state with the profile taken from another formula family.
    ///
    /// Used on zone lines where two families are equilibria to tolerance.
    /// Returns `None` unless the alternative passes the equilibrium checks.
    pub fn with_kind(&self, kind: NeKind, prices: &PriceState, params: &ModelParams) -> Option<Self> {
        let profile = kind.profile(prices, params);
        if profile.as_array().iter().any(|v| !v.is_finite() || *v < -EPS) {
            return None;
        }
        if !crate::model::feasible(&profile, prices, params) {
            return None;
        }
        if !check_fixed_point(&profile, prices, params).ok()?.ok || !check_lemmas(&profile, prices, params).all() {
            return None;
        }
        Some(Self {
            profile,
            aggregates: aggregates_unchecked(&profile, prices, params),
            payoffs: (payoff1(&profile, params), payoff2(&profile, params)),
            kind,
            boundary: Some(BoundaryDetail::LineBand),
            ..*self
        })
    }

    /// Zone label prefixed with `swapped:` when it refers to the relabelled economy.
    pub fn zone_tag(&self) -> String {
        match self.frame {
            Frame::Canonical => self.zone.to_string(),
            Frame::Swapped => format!("swapped:{}", self.zone),
        }
    }

    /// True if neither trade direction is active.
    pub fn no_trade(&self) -> bool {
        self.profile.beta <= EPS && self.profile.gamma <= EPS
    }
}

/// Equilibrium in the canonical labelling (`p2 q2 <= p1 q1` unless zone III).
///
/// A zero `p2` is allowed; a zero `p1` breaks the orientation and is rejected.
pub fn solve_nash(prices: &PriceState, params: &ModelParams) -> Result<EquilibriumResult> {
    params.validate()?;
    prices.validate()?;
    match (prices.p1 == 0.0, prices.p2 == 0.0) {
        (true, true) => Err(Error::DegeneratePrice),
        (false, true) => {
            let zone = classify_degenerate(prices, params)?;
            let boundary = match zone {
                ZoneLabel::Boundary(d) => Some(d),
                _ => None,
            };
            Ok(EquilibriumResult::build(NeKind::FreeGood2, zone, None, boundary, prices, params))
        }
        (true, false) => Err(Error::OrientationViolated { p1q1: 0.0, p2q2: prices.p2 * params.q2 }),
        (false, false) => {
            let (zone, tie) = classify_resolved(prices, params)?;
            let branch = delta_p_branch(prices, params);
            let above_l2 = residuals(prices, params).l2 >= -EPS;
            let kind = ne_kind(zone, branch, above_l2).expect("regular labels have a table entry");
            let boundary = tie.then_some(BoundaryDetail::OrientationTie);
            Ok(EquilibriumResult::build(kind, zone, Some(case_relation(prices, params)), boundary, prices, params))
        }
    }
}

/// Equilibrium in either orientation; relabels the regions when needed.
pub fn solve_nash_any(prices: &PriceState, params: &ModelParams) -> Result<EquilibriumResult> {
    match solve_nash(prices, params) {
        Err(Error::OrientationViolated { .. }) => {
            let r = solve_nash(&prices.swapped(), &params.swapped())?;
            Ok(r.unswap())
        }
        other => other,
    }
}

/// Distance of a profile from the best replies to itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub max_deviation: f64,
    pub ok: bool,
}

/// Check that each consumer's orders are the selected best reply to the other's.
pub fn check_fixed_point(
    profile: &StrategyProfile,
    prices: &PriceState,
    params: &ModelParams,
) -> Result<FixedPointReport> {
    let s = profile;
    let r1 = best_reply_1((s.gamma, s.delta), prices, params)?;
    let r2 = best_reply_2((s.alpha, s.beta), prices, params)?;
    let dev = [
        (r1.home - s.alpha).abs() / s.alpha.abs().max(1.0),
        (r1.foreign - s.beta).abs() / s.beta.abs().max(1.0),
        (r2.foreign - s.gamma).abs() / s.gamma.abs().max(1.0),
        (r2.home - s.delta).abs() / s.delta.abs().max(1.0),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(FixedPointReport { max_deviation: dev, ok: dev <= 1e-8 })
}

/// Structural properties every equilibrium satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    /// Orders never exceed supply.
    pub supply_respected: bool,
    /// No price can be due to move both down and up.
    pub single_adjustment: bool,
    /// A consumer either gets the full home supply or spends all income.
    pub home_filled_or_income_spent: bool,
}

impl LemmaReport {
    pub fn all(&self) -> bool {
        self.supply_respected && self.single_adjustment && self.home_filled_or_income_spent
    }
}

pub fn check_lemmas(profile: &StrategyProfile, prices: &PriceState, params: &ModelParams) -> LemmaReport {
    let s = profile;
    let a = aggregates_unchecked(s, prices, params);
    let tol1 = EPS * params.q1.max(1.0);
    let tol2 = EPS * params.q2.max(1.0);
    let supply_respected = (prices.p1 == 0.0 || s.alpha + s.gamma <= params.q1 + tol1)
        && (prices.p2 == 0.0 || s.beta + s.delta <= params.q2 + tol2);
    let down1 = a.q1_cons < params.q1 - tol1;
    let up1 = a.y1_res > prices.p1 * params.q1 + EPS;
    let down2 = a.q2_cons < params.q2 - tol2;
    let up2 = a.y2_res > prices.p2 * params.q2 + EPS;
    let single_adjustment = !(down1 && up1) && !(down2 && up2);
    let money_tol1 = EPS * params.y1.max(1.0);
    let money_tol2 = EPS * params.y2.max(1.0);
    let ok1 = s.alpha >= params.q1 - tol1 || (params.y1 - a.y1_cons).abs() <= money_tol1;
    let ok2 = s.delta >= params.q2 - tol2 || (params.y2 - a.y2_cons).abs() <= money_tol2;
    LemmaReport { supply_respected, single_adjustment, home_filled_or_income_spent: ok1 && ok2 }
}
