//! Discrete price adjustment.
//!
//! At each step the equilibrium at current prices is computed and each
//! price moves at most once:
//!
//! * unsold supply (`qi_cons < qi`) lowers the price so that the value of the
//!   supply equals the value of what was sold, `pi' qi = pi qi_cons`;
//! * unspent foreign-free income (`Yi_res > pi qi`) raises the price to
//!   `Yi_res / qi`.
//!
//! Trajectories end at a steady state, or are recognised as converging
//! to a limit they never reach.

use serde::{Deserialize, Serialize};

use crate::equilibrium::nash::{solve_nash_any, EquilibriumResult, NeKind};
use crate::error::{Error, Result};
use crate::model::{ModelParams, PriceState, EPS};
use crate::zones::{classify_resolved, residuals};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Down,
    Up,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjustmentEvent {
    /// 1 or 2.
    pub region: u8,
    pub direction: Direction,
    pub from: f64,
    pub to: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub prices: PriceState,
    pub equilibrium: EquilibriumResult,
    /// Adjustments leading from `t` to `t + 1`.
    pub events: [Option<AdjustmentEvent>; 2],
}

/// Long-run behaviour of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum SteadyStateClass {
    /// No trade, incomes equal supply values.
    TypeE,
    /// Steady state with consumer I importing.
    L3,
    /// Steady state with consumer II importing.
    L4,
    /// `p2 = 0`; `p1` settles at `p1_inf`.
    DegenerateL1 { p1_inf: f64 },
    /// `p1 = 0`; `p2` settles at `p2_inf`.
    DegenerateL2 { p2_inf: f64 },
    /// `p1` decreases forever towards `k` with `p2` fixed.
    DegenerateL4 { k: f64 },
    /// `p2` decreases forever towards `k` with `p1` fixed.
    DegenerateL3 { k: f64 },
    Unresolved { max_steps: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    /// First step at which prices stopped moving, for finite convergence.
    pub converged_at: Option<usize>,
    pub classification: SteadyStateClass,
}

impl Trajectory {
    /// Prices at step `t`; the last state when `t` is beyond the end.
    pub fn price_at(&self, t: usize) -> PriceState {
        self.records[t.min(self.records.len() - 1)].prices
    }

    pub fn last(&self) -> &StepRecord {
        self.records.last().expect("trajectories are never empty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteConfig {
    pub max_steps: usize,
    /// Stop once `|dp1| + |dp2|` falls below this.
    pub tol: f64,
    /// Reject initial states whose labelling would need the regions exchanged.
    pub enforce_orientation: bool,
}

impl Default for DiscreteConfig {
    fn default() -> Self {
        Self { max_steps: 100_000, tol: 1e-12, enforce_orientation: true }
    }
}

/// Adjustment of one price. The triggers compare exactly so that prices keep
/// converging inside the tolerance band; only a conflict beyond tolerance is
/// an error.
fn adjust(region: u8, p: f64, q: f64, q_cons: f64, y_res: f64) -> Result<Option<AdjustmentEvent>> {
    let down_clear = q_cons < q - EPS * q.max(1.0);
    let up_clear = y_res > p * q + EPS;
    if down_clear && up_clear {
        return Err(Error::PreconditionViolated(format!("price {region} would move both down and up")));
    }
    let down = AdjustmentEvent {
        region,
        direction: Direction::Down,
        from: p,
        to: if q_cons <= EPS { 0.0 } else { p * q_cons / q },
    };
    let up = AdjustmentEvent { region, direction: Direction::Up, from: p, to: y_res / q };
    Ok(if up_clear {
        Some(up)
    } else if q_cons < q {
        Some(down)
    } else if y_res > p * q {
        Some(up)
    } else {
        None
    })
}

/// One adjustment step: next prices, the equilibrium at current prices and the events.
pub fn step(
    prices: &PriceState,
    params: &ModelParams,
) -> Result<(PriceState, EquilibriumResult, [Option<AdjustmentEvent>; 2])> {
    step_following(prices, params, None)
}

/// Like [`step`], but on a zone line keeps the formula family `previous` if it
/// is still an equilibrium there.
fn step_following(
    prices: &PriceState,
    params: &ModelParams,
    previous: Option<NeKind>,
) -> Result<(PriceState, EquilibriumResult, [Option<AdjustmentEvent>; 2])> {
    let mut eq = solve_nash_any(prices, params)?;
    if let Some(k) = previous.filter(|k| *k != eq.kind) {
        if let Some(alt) = eq.with_kind(k, prices, params) {
            eq = alt;
        }
    }
    let a = eq.aggregates;
    let e1 = adjust(1, prices.p1, params.q1, a.q1_cons, a.y1_res)?;
    let e2 = adjust(2, prices.p2, params.q2, a.q2_cons, a.y2_res)?;
    let next = PriceState {
        p1: e1.map_or(prices.p1, |e| e.to),
        p2: e2.map_or(prices.p2, |e| e.to),
    };
    Ok((next, eq, [e1, e2]))
}

/// Iterate with the default configuration and the given step budget and tolerance.
pub fn iterate(prices0: &PriceState, params: &ModelParams, max_steps: usize, tol: f64) -> Result<Trajectory> {
    iterate_with(prices0, params, &DiscreteConfig { max_steps, tol, ..Default::default() })
}

pub fn iterate_with(prices0: &PriceState, params: &ModelParams, cfg: &DiscreteConfig) -> Result<Trajectory> {
    params.validate()?;
    prices0.validate()?;
    if prices0.p1 == 0.0 && prices0.p2 == 0.0 {
        return Err(Error::DegeneratePrice);
    }
    if !(cfg.tol.is_finite() && cfg.tol >= 0.0) {
        return Err(Error::Domain("tol must be finite and >= 0".into()));
    }
    if cfg.enforce_orientation {
        check_orientation(prices0, params)?;
    }

    let mut records = Vec::new();
    let mut pattern = None;
    let mut converged_at = None;
    let mut p = *prices0;
    for t in 0..=cfg.max_steps {
        let previous = records.last().map(|r: &StepRecord| r.equilibrium.kind);
        let (next, eq, events) = step_following(&p, params, previous)?;
        if pattern.is_none() {
            pattern = infinite_pattern(&p, &eq, params);
        }
        records.push(StepRecord { t, prices: p, equilibrium: eq, events });
        let change = (next.p1 - p.p1).abs() + (next.p2 - p.p2).abs();
        if change == 0.0 || change < cfg.tol {
            converged_at = Some(t);
            break;
        }
        p = next;
    }

    let classification = match (pattern, converged_at) {
        (Some(c), _) => c,
        (None, Some(_)) => {
            let last = records.last().expect("at least one record");
            steady_class(&last.prices, &last.equilibrium)
        }
        (None, None) => SteadyStateClass::Unresolved { max_steps: cfg.max_steps },
    };
    if pattern.is_some() {
        converged_at = None;
    }
    Ok(Trajectory { records, converged_at, classification })
}

fn check_orientation(prices: &PriceState, params: &ModelParams) -> Result<()> {
    if prices.p1 == 0.0 {
        return Err(Error::OrientationViolated { p1q1: 0.0, p2q2: prices.p2 * params.q2 });
    }
    if prices.p2 == 0.0 {
        return Ok(());
    }
    classify_resolved(prices, params).map(|_| ())
}

fn steady_class(prices: &PriceState, eq: &EquilibriumResult) -> SteadyStateClass {
    if prices.p2 == 0.0 {
        return SteadyStateClass::DegenerateL1 { p1_inf: prices.p1 };
    }
    if prices.p1 == 0.0 {
        return SteadyStateClass::DegenerateL2 { p2_inf: prices.p2 };
    }
    let s = eq.profile;
    match (s.beta > EPS, s.gamma > EPS) {
        (false, false) => SteadyStateClass::TypeE,
        (false, true) => SteadyStateClass::L4,
        (true, false) => SteadyStateClass::L3,
        (true, true) => SteadyStateClass::Unresolved { max_steps: 0 },
    }
}

/// Recognise states from which prices converge without ever arriving.
fn infinite_pattern(prices: &PriceState, eq: &EquilibriumResult, params: &ModelParams) -> Option<SteadyStateClass> {
    if prices.p2 == 0.0 {
        let r1 = params.y1 + prices.p1 / prices.p1_import(params) * params.y2 - prices.p1 * params.q1;
        return (r1 < -EPS).then(|| SteadyStateClass::DegenerateL1 { p1_inf: p1_infinity(params) });
    }
    if prices.p1 == 0.0 {
        let r2 = params.y2 + prices.p2 / prices.p2_import(params) * params.y1 - prices.p2 * params.q2;
        return (r2 < -EPS).then(|| SteadyStateClass::DegenerateL2 { p2_inf: p2_infinity(params) });
    }
    match eq.kind {
        NeKind::IiResidual if params.y2 > prices.p2 * params.q2 + EPS => {
            let k = limit_k(prices, params).ok()?;
            (prices.p2 - params.rho <= k + EPS && k < prices.p1 - EPS).then_some(SteadyStateClass::DegenerateL4 { k })
        }
        NeKind::IvResidual if params.y1 > prices.p1 * params.q1 + EPS => {
            let (m, p) = (params.swapped(), prices.swapped());
            let k = limit_k(&p, &m).ok()?;
            (p.p2 - m.rho <= k + EPS && k < p.p1 - EPS).then_some(SteadyStateClass::DegenerateL3 { k })
        }
        _ => None,
    }
}

/// Map followed by `p1` while consumer II imports with `p2` frozen at `p2_0`.
pub fn g_map(x: f64, p2_0: f64, params: &ModelParams) -> f64 {
    (params.y1 + (params.y2 - p2_0 * params.q2) * x / (x + params.rho)) / params.q1
}

/// Map followed by `p1` while `p2` is zero.
pub fn h_map(x: f64, params: &ModelParams) -> f64 {
    (params.y1 + x * params.y2 / (x + params.rho)) / params.q1
}

/// Positive fixed point of [`g_map`] for the given initial state.
pub fn limit_k(prices0: &PriceState, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    prices0.validate()?;
    let ModelParams { y1, y2, q1, q2, rho } = *params;
    if !(y2 > prices0.p2 * q2) {
        return Err(Error::PreconditionViolated("limit k needs Y2 > p2 q2".into()));
    }
    let b = rho * q1 - y1 - y2 + prices0.p2 * q2;
    Ok(((b * b + 4.0 * q1 * rho * y1).sqrt() - b) / (2.0 * q1))
}

/// Positive fixed point of [`h_map`].
pub fn p1_infinity(params: &ModelParams) -> f64 {
    let ModelParams { y1, y2, q1, rho, .. } = *params;
    let b = y1 + y2 - rho * q1;
    (b + (b * b + 4.0 * rho * q1 * y1).sqrt()) / (2.0 * q1)
}

/// Mirror of [`p1_infinity`] for `p2` when `p1` is zero.
pub fn p2_infinity(params: &ModelParams) -> f64 {
    p1_infinity(&params.swapped())
}

/// Number of adjustments after which `p1 - p2` first drops to `-rho` or below,
/// for an initial state whose decreasing `p1` eventually crosses `p2 - rho`.
pub fn switch_steps(prices0: &PriceState, params: &ModelParams) -> Result<usize> {
    params.validate()?;
    prices0.validate()?;
    if !prices0.is_positive() {
        return Err(Error::DegeneratePrice);
    }
    let r = residuals(prices0, params);
    if !(r.a1 < -EPS && r.a2 > EPS && r.l4 < -EPS && r.l1 >= -EPS) {
        return Err(Error::PreconditionViolated("initial state must lie in zone II-2".into()));
    }
    let k = limit_k(prices0, params)?;
    let target = prices0.p2 - params.rho;
    if !(k < target && target < prices0.p1) {
        return Err(Error::PreconditionViolated(format!(
            "need k < p2 - rho < p1, got k = {k}, p2 - rho = {target}, p1 = {}",
            prices0.p1
        )));
    }
    let mut x = prices0.p1;
    let mut s = 0;
    while x > target {
        x = g_map(x, prices0.p2, params);
        s += 1;
        if s > 100_000_000 {
            return Err(Error::NoConvergence { sweeps: s });
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(y1: f64, y2: f64) -> ModelParams {
        ModelParams::new(y1, y2, 2.0, 3.0, 0.5).unwrap()
    }

    #[test]
    fn zone_three_converges_in_one_step() {
        let tr = iterate(&PriceState::new(1.0, 1.0).unwrap(), &params(4.0, 6.0), 100, 1e-12).unwrap();
        assert_eq!(tr.price_at(1), PriceState { p1: 2.0, p2: 2.0 });
        assert_eq!(tr.converged_at, Some(1));
        assert_eq!(tr.classification, SteadyStateClass::TypeE);
    }

    #[test]
    fn zone_ii3_reaches_trade_steady_state() {
        let tr = iterate(&PriceState::new(2.0, 1.0).unwrap(), &params(2.0, 6.0), 100, 1e-12).unwrap();
        let p = tr.price_at(1);
        assert_eq!(p.p1, 2.0);
        assert!((p.p2 - 3.5 / 3.0).abs() < 1e-15);
        assert_eq!(tr.converged_at, Some(1));
        assert_eq!(tr.classification, SteadyStateClass::L4);
    }

    #[test]
    fn zone_ii2_converges_forever() {
        let m = params(2.0, 4.0);
        let p0 = PriceState::new(2.0, 1.0).unwrap();
        let tr = iterate(&p0, &m, 10_000, 1e-13).unwrap();
        assert!((tr.price_at(1).p1 - 1.4).abs() < 1e-15);
        let k = (12f64.sqrt() + 2.0) / 4.0;
        assert!((limit_k(&p0, &m).unwrap() - k).abs() < 1e-12);
        match tr.classification {
            SteadyStateClass::DegenerateL4 { k: kk } => assert!((kk - k).abs() < 1e-12),
            c => panic!("unexpected {c:?}"),
        }
        assert_eq!(tr.converged_at, None);
        assert!((tr.last().prices.p1 - k).abs() < 1e-10);
        for w in tr.records.windows(2) {
            assert!(w[1].prices.p1 < w[0].prices.p1);
            assert_eq!(w[1].prices.p2, 1.0);
        }
    }

    #[test]
    fn infinity_limits() {
        let m = params(2.0, 4.0);
        let p = p1_infinity(&m);
        assert!((p - (5.0 + 33f64.sqrt()) / 4.0).abs() < 1e-12);
        assert!((h_map(p, &m) - p).abs() < 1e-12);
        let p2 = p2_infinity(&m);
        assert!((p2 - (4.5 + 44.25f64.sqrt()) / 6.0).abs() < 1e-12);
    }

    #[test]
    fn orientation_checked_at_entry() {
        let m = params(1.0, 5.0);
        let err = iterate(&PriceState::new(0.4, 1.9).unwrap(), &m, 10, 1e-12).unwrap_err();
        assert!(matches!(err, Error::OrientationViolated { .. }));
        assert!(iterate(&PriceState { p1: 0.0, p2: 0.0 }, &m, 10, 1e-12).is_err());
    }

    #[test]
    fn switch_steps_precondition() {
        let m = params(2.0, 4.0);
        assert!(matches!(
            switch_steps(&PriceState::new(2.0, 1.0).unwrap(), &m),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
