//! Partition of income space `(Y1, Y2)` at fixed prices.
//!
//! Six lines split the positive quadrant. Each is reported as a residual in
//! money units: positive means the income point lies strictly above the line,
//! zero (within [`EPS`]) means on it.
//!
//! | line | residual |
//! |------|----------|
//! | l1 | `Y1 + (p1/p1')Y2 - p1 q1` |
//! | l2 | `(p2/p2')Y1 + Y2 - p2 q2` |
//! | l3 | `(p2/p2')Y1 + Y2 - (p2/p2')(p1 q1 + p2' q2)` |
//! | l4 | `Y1 + (p1/p1')Y2 - (p1/p1')(p1' q1 + p2 q2)` |
//!
//! plus the axes-parallel lines `Y1 = p1 q1` and `Y2 = p2 q2`.
//! Labels assume `p2 q2 <= p1 q1`; the opposite case is obtained by
//! relabelling the regions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, PriceState, EPS};

/// Zone of income space at given prices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ZoneLabel {
    III,
    II1,
    II2,
    II3,
    I1,
    I2,
    I3,
    IV1,
    IV2,
    Z1_1,
    Z1_2,
    Z1_3,
    Z1_4,
    /// `p2 = 0` and incomes strictly below l1.
    DegenerateII1,
    /// Point on a boundary the labelling does not resolve by itself.
    Boundary(BoundaryDetail),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryDetail {
    /// `p1 q1` and `p2 q2` agree within tolerance; the canonical tables apply.
    OrientationTie,
    /// `p2 = 0` with incomes on or above l1.
    ZeroPriceOnOrAboveL1,
    /// Within tolerance of a zone line where the neighbouring table entry is
    /// also an equilibrium; that entry was kept.
    LineBand,
}

impl ZoneLabel {
    /// Labels of the non-degenerate zones, in table order.
    pub const REGULAR: [ZoneLabel; 13] = [
        ZoneLabel::III,
        ZoneLabel::II1,
        ZoneLabel::II2,
        ZoneLabel::II3,
        ZoneLabel::I1,
        ZoneLabel::I2,
        ZoneLabel::I3,
        ZoneLabel::IV1,
        ZoneLabel::IV2,
        ZoneLabel::Z1_1,
        ZoneLabel::Z1_2,
        ZoneLabel::Z1_3,
        ZoneLabel::Z1_4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ZoneLabel::III => "III",
            ZoneLabel::II1 => "II_1",
            ZoneLabel::II2 => "II_2",
            ZoneLabel::II3 => "II_3",
            ZoneLabel::I1 => "I_1",
            ZoneLabel::I2 => "I_2",
            ZoneLabel::I3 => "I_3",
            ZoneLabel::IV1 => "IV_1",
            ZoneLabel::IV2 => "IV_2",
            ZoneLabel::Z1_1 => "Z1_1",
            ZoneLabel::Z1_2 => "Z1_2",
            ZoneLabel::Z1_3 => "Z1_3",
            ZoneLabel::Z1_4 => "Z1_4",
            ZoneLabel::DegenerateII1 => "DegenerateII_1",
            ZoneLabel::Boundary(BoundaryDetail::OrientationTie) => "Boundary(OrientationTie)",
            ZoneLabel::Boundary(BoundaryDetail::ZeroPriceOnOrAboveL1) => "Boundary(ZeroPriceOnOrAboveL1)",
            ZoneLabel::Boundary(BoundaryDetail::LineBand) => "Boundary(LineBand)",
        }
    }
}

impl fmt::Display for ZoneLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Comparison of `p2' q2` with `p1 q1`; selects the Z1 refinement of zone I.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseRelation {
    Lt,
    Eq,
    Gt,
}

/// Position of `dp = p1 - p2` relative to the transport cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeltaPBranch {
    /// `-rho < dp < rho`.
    Inside,
    EqMinusRho,
    LtMinusRho,
    EqPlusRho,
    GtPlusRho,
}

impl DeltaPBranch {
    /// `dp >= -rho`.
    pub fn at_least_minus_rho(self) -> bool {
        !matches!(self, DeltaPBranch::LtMinusRho)
    }

    /// `dp <= rho`.
    pub fn at_most_plus_rho(self) -> bool {
        !matches!(self, DeltaPBranch::GtPlusRho)
    }

    /// Branch after exchanging the regions (`dp` changes sign).
    pub fn swapped(self) -> Self {
        match self {
            DeltaPBranch::Inside => DeltaPBranch::Inside,
            DeltaPBranch::EqMinusRho => DeltaPBranch::EqPlusRho,
            DeltaPBranch::LtMinusRho => DeltaPBranch::GtPlusRho,
            DeltaPBranch::EqPlusRho => DeltaPBranch::EqMinusRho,
            DeltaPBranch::GtPlusRho => DeltaPBranch::LtMinusRho,
        }
    }
}

/// Signed residuals of the income point against the partition lines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineResiduals {
    /// `Y1 - p1 q1`.
    pub a1: f64,
    /// `Y2 - p2 q2`.
    pub a2: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
}

pub fn line_values(prices: &PriceState, params: &ModelParams) -> Result<LineResiduals> {
    params.validate()?;
    prices.validate()?;
    if !prices.is_positive() {
        return Err(Error::DegeneratePrice);
    }
    Ok(residuals(prices, params))
}

pub(crate) fn residuals(prices: &PriceState, params: &ModelParams) -> LineResiduals {
    let ModelParams { y1, y2, q1, q2, .. } = *params;
    let (p1, p2) = (prices.p1, prices.p2);
    let (p1i, p2i) = (prices.p1_import(params), prices.p2_import(params));
    let r1 = p1 / p1i;
    let r2 = p2 / p2i;
    LineResiduals {
        a1: y1 - p1 * q1,
        a2: y2 - p2 * q2,
        l1: y1 + r1 * y2 - p1 * q1,
        l2: r2 * y1 + y2 - p2 * q2,
        l3: r2 * y1 + y2 - r2 * (p1 * q1 + p2i * q2),
        l4: y1 + r1 * y2 - r1 * (p1i * q1 + p2 * q2),
    }
}

/// Compare `p2' q2` with `p1 q1`.
pub fn case_relation(prices: &PriceState, params: &ModelParams) -> CaseRelation {
    let d = prices.p2_import(params) * params.q2 - prices.p1 * params.q1;
    if d.abs() <= EPS {
        CaseRelation::Eq
    } else if d < 0.0 {
        CaseRelation::Lt
    } else {
        CaseRelation::Gt
    }
}

pub fn delta_p_branch(prices: &PriceState, params: &ModelParams) -> DeltaPBranch {
    let dp = prices.p1 - prices.p2;
    let rho = params.rho;
    if (dp + rho).abs() <= EPS {
        DeltaPBranch::EqMinusRho
    } else if (dp - rho).abs() <= EPS {
        DeltaPBranch::EqPlusRho
    } else if dp < -rho {
        DeltaPBranch::LtMinusRho
    } else if dp > rho {
        DeltaPBranch::GtPlusRho
    } else {
        DeltaPBranch::Inside
    }
}

/// Label the income point at positive prices.
///
/// Zone III is orientation free. Every other zone requires
/// `p2 q2 <= p1 q1`; a tie within [`EPS`] is flagged as
/// `Boundary(OrientationTie)` and resolved by [`classify_resolved`].
pub fn classify(prices: &PriceState, params: &ModelParams) -> Result<ZoneLabel> {
    let (label, tie) = classify_resolved(prices, params)?;
    Ok(if tie { ZoneLabel::Boundary(BoundaryDetail::OrientationTie) } else { label })
}

/// Like [`classify`] but returns the canonical label for orientation ties,
/// together with a flag telling whether a tie occurred.
pub fn classify_resolved(prices: &PriceState, params: &ModelParams) -> Result<(ZoneLabel, bool)> {
    let r = line_values(prices, params)?;
    if r.a1 >= -EPS && r.a2 >= -EPS {
        return Ok((ZoneLabel::III, false));
    }
    let p1q1 = prices.p1 * params.q1;
    let p2q2 = prices.p2 * params.q2;
    if p2q2 > p1q1 + EPS {
        return Err(Error::OrientationViolated { p1q1, p2q2 });
    }
    let tie = (p2q2 - p1q1).abs() <= EPS;
    Ok((label_canonical(&r, case_relation(prices, params)), tie))
}

pub(crate) fn label_canonical(r: &LineResiduals, case: CaseRelation) -> ZoneLabel {
    let on_or_above = |v: f64| v >= -EPS;
    let below1 = r.a1 < -EPS;
    let below2 = r.a2 < -EPS;
    match (below1, below2) {
        (false, false) => ZoneLabel::III,
        (true, false) => {
            if on_or_above(r.l4) {
                ZoneLabel::II3
            } else if on_or_above(r.l1) {
                ZoneLabel::II2
            } else {
                ZoneLabel::II1
            }
        }
        (false, true) => {
            if on_or_above(r.l3) {
                ZoneLabel::IV1
            } else {
                ZoneLabel::IV2
            }
        }
        (true, true) => match case {
            CaseRelation::Lt | CaseRelation::Eq => {
                if on_or_above(r.l1) {
                    ZoneLabel::I1
                } else if on_or_above(r.l2) {
                    ZoneLabel::I2
                } else {
                    ZoneLabel::I3
                }
            }
            CaseRelation::Gt => match (on_or_above(r.l1), on_or_above(r.l2)) {
                (false, false) => ZoneLabel::Z1_1,
                (true, false) => ZoneLabel::Z1_2,
                (false, true) => ZoneLabel::Z1_3,
                (true, true) => ZoneLabel::Z1_4,
            },
        },
    }
}

/// Label of a state with `p2 = 0 < p1`.
pub fn classify_degenerate(prices: &PriceState, params: &ModelParams) -> Result<ZoneLabel> {
    params.validate()?;
    prices.validate()?;
    if !(prices.p2 == 0.0 && prices.p1 > 0.0) {
        return Err(Error::Domain("degenerate labelling needs p2 = 0 < p1".into()));
    }
    let r1 = params.y1 + prices.p1 / prices.p1_import(params) * params.y2 - prices.p1 * params.q1;
    Ok(if r1 < -EPS {
        ZoneLabel::DegenerateII1
    } else {
        ZoneLabel::Boundary(BoundaryDetail::ZeroPriceOnOrAboveL1)
    })
}

/// The loci in price space where continuous-time prices are stationary.
///
/// `h4` is the price curve along which incomes sit on l4 and `h3` the one
/// for l3. Both end where they meet a price axis, at `p1_star` and
/// `p2_star` respectively, and start from the zone III fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceSpaceLoci {
    pub params: ModelParams,
    pub p1_star: f64,
    pub p2_star: f64,
}

pub fn price_space_loci(params: &ModelParams) -> Result<PriceSpaceLoci> {
    params.validate()?;
    let ModelParams { y1, y2, q1, q2, rho } = *params;
    let b1 = y1 + y2 - rho * q1;
    let p1_star = (b1 + (b1 * b1 + 4.0 * rho * q1 * y1).sqrt()) / (2.0 * q1);
    let b2 = y1 + y2 - rho * q2;
    let p2_star = (b2 + (b2 * b2 + 4.0 * rho * q2 * y2).sqrt()) / (2.0 * q2);
    Ok(PriceSpaceLoci { params: *params, p1_star, p2_star })
}

impl PriceSpaceLoci {
    pub fn e_tilde(&self) -> PriceState {
        self.params.e_tilde()
    }

    /// `p1` on the l3 locus for given `p2 > 0`.
    pub fn h3(&self, p2: f64) -> Result<f64> {
        if !(p2.is_finite() && p2 > 0.0) {
            return Err(Error::Domain(format!("h3 needs p2 > 0, got {p2}")));
        }
        let ModelParams { y1, y2, q1, q2, rho } = self.params;
        Ok((y1 + y2 - rho * q2 - p2 * q2 + rho * y2 / p2) / q1)
    }

    /// `p2` on the l4 locus for given `p1 > 0`.
    pub fn h4(&self, p1: f64) -> Result<f64> {
        if !(p1.is_finite() && p1 > 0.0) {
            return Err(Error::Domain(format!("h4 needs p1 > 0, got {p1}")));
        }
        let ModelParams { y1, y2, q1, q2, rho } = self.params;
        Ok((y1 + y2 - rho * q1 - p1 * q1 + rho * y1 / p1) / q2)
    }

    /// Stationary arc along `h4`: `p1` in `[Y1/q1, p1_star)`.
    pub fn h4_range(&self) -> (f64, f64) {
        (self.params.y1 / self.params.q1, self.p1_star)
    }

    /// Stationary arc along `h3`: `p2` in `[Y2/q2, p2_star)`.
    pub fn h3_range(&self) -> (f64, f64) {
        (self.params.y2 / self.params.q2, self.p2_star)
    }
}
