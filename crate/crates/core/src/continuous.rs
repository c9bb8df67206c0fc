//! Continuous-time price adjustment.
//!
//! Prices follow `dpi/dt = fi` with
//!
//! ```text
//! fi = -pi (qi - qi_cons)/qi + (Yi - Yi_cons)/qi
//! ```
//!
//! evaluated at the equilibrium for the current prices. The field is
//! piecewise smooth: each equilibrium formula family ([`NeKind`]) gives one
//! smooth piece, and the pieces are glued along zone boundaries and along
//! the lines `p1 - p2 = -rho` and `p1 - p2 = rho`.
//!
//! The integrator steps with the field of the current piece, locates
//! switches by bisection in time, and slides along a price-difference line
//! when the fields on both sides push into it. The sliding velocity is the
//! convex combination of the two fields that is tangent to the line.

use serde::{Deserialize, Serialize};

use crate::equilibrium::nash::{solve_nash, solve_nash_any, EquilibriumResult, NeKind};
use crate::error::{Error, Result};
use crate::model::{aggregates_unchecked, ModelParams, PriceState, StrategyProfile, EPS};
use crate::zones::{delta_p_branch, price_space_loci, residuals, DeltaPBranch, ZoneLabel};

// ---------------------------------------------------------------------------
// Right-hand side
// ---------------------------------------------------------------------------

/// Field value with the equilibrium data that selected it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhsValue {
    pub f: [f64; 2],
    pub equilibrium: EquilibriumResult,
    /// True if a closed-form cell was used rather than the generic formula.
    pub from_table: bool,
}

/// Generic field built from any profile.
pub fn drift_from_profile(profile: &StrategyProfile, prices: &PriceState, params: &ModelParams) -> [f64; 2] {
    let a = aggregates_unchecked(profile, prices, params);
    [
        -prices.p1 * (params.q1 - a.q1_cons) / params.q1 + (params.y1 - a.y1_cons) / params.q1,
        -prices.p2 * (params.q2 - a.q2_cons) / params.q2 + (params.y2 - a.y2_cons) / params.q2,
    ]
}

/// Smooth piece of the field belonging to a formula family, evaluated at any prices.
pub fn kind_field(kind: NeKind, prices: &PriceState, params: &ModelParams) -> [f64; 2] {
    drift_from_profile(&kind.profile(prices, params), prices, params)
}

/// Closed-form field cells for the canonical zones.
///
/// Returns `None` for the Z1 zones and for the part of IV-2 below l2,
/// which have no cell of their own.
pub fn table_cell(
    zone: ZoneLabel,
    branch: DeltaPBranch,
    above_l2: bool,
    prices: &PriceState,
    params: &ModelParams,
) -> Option<[f64; 2]> {
    use DeltaPBranch::*;
    use ZoneLabel as Z;
    let ModelParams { y1, y2, q1, q2, .. } = *params;
    let (p1, p2) = (prices.p1, prices.p2);
    let (p1i, p2i) = (prices.p1_import(params), prices.p2_import(params));
    let lt = branch == LtMinusRho;
    let gt = branch == GtPlusRho;

    let home_gap = [(y1 - p1 * q1) / q1, (y2 - p2 * q2) / q2];
    let ii_residual = [y1 / q1 + (y2 - p2 * q2) * p1 / (q1 * p1i) - p1, 0.0];
    let ii_fill = [0.0, (y2 - p1i * (q1 - y1 / p1)) / q2 - p2];
    let ii_all_import = [(y1 / p1 + y2 / p1i - q1) * p1 / q1, -p2];
    let iv_fill = [(y1 - p2i * (q2 - y2 / p2)) / q1 - p1, 0.0];

    Some(match zone {
        Z::III => home_gap,
        Z::II3 => [0.0, (y2 - p2 * q2 - p1i * (q1 - y1 / p1)) / q2],
        Z::II2 if lt => ii_fill,
        Z::II2 | Z::II1 if !lt => ii_residual,
        Z::II1 => ii_all_import,
        Z::I1 | Z::I2 | Z::I3 if !lt && !gt => home_gap,
        Z::I1 if lt => ii_fill,
        Z::I2 | Z::I3 if lt => ii_all_import,
        Z::I1 | Z::I2 => iv_fill,
        Z::I3 => [-p1, (y1 / p2i + y2 / p2 - q2) * p2 / q2],
        Z::IV1 => [(y1 - p1 * q1 - p2i * (q2 - y2 / p2)) / q1, 0.0],
        Z::IV2 if !gt => [0.0, (y1 - p1 * q1) * p2 / (q2 * p2i) + y2 / q2 - p2],
        Z::IV2 if above_l2 => iv_fill,
        _ => return None,
    })
}

/// Field at positive prices in the canonical labelling.
///
/// Uses the closed-form cell when one exists and the generic formula otherwise.
pub fn rhs(prices: &PriceState, params: &ModelParams) -> Result<RhsValue> {
    if !prices.is_positive() {
        prices.validate()?;
        return Err(Error::DegeneratePrice);
    }
    let eq = solve_nash(prices, params)?;
    let above_l2 = residuals(prices, params).l2 >= -EPS;
    Ok(match table_cell(eq.zone, eq.branch, above_l2, prices, params) {
        Some(f) => RhsValue { f, equilibrium: eq, from_table: true },
        None => RhsValue { f: drift_from_profile(&eq.profile, prices, params), equilibrium: eq, from_table: false },
    })
}

/// Field at any admissible prices, in either orientation.
pub fn drift(prices: &PriceState, params: &ModelParams) -> Result<[f64; 2]> {
    let eq = solve_nash_any(prices, params)?;
    Ok(drift_from_profile(&eq.profile, prices, params))
}

// ---------------------------------------------------------------------------
// Switching lines
// ---------------------------------------------------------------------------

/// Price-difference line along which the field may switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SwitchLine {
    /// `p1 - p2 = -rho`.
    MinusRho,
    /// `p1 - p2 = rho`.
    PlusRho,
}

impl SwitchLine {
    /// Offset `c` in `g(p) = p2 - p1 - c`.
    fn offset(self, rho: f64) -> f64 {
        match self {
            SwitchLine::MinusRho => rho,
            SwitchLine::PlusRho => -rho,
        }
    }

    fn g(self, p: &PriceState, rho: f64) -> f64 {
        p.p2 - p.p1 - self.offset(rho)
    }

    fn project(self, p: &PriceState, rho: f64) -> PriceState {
        let g = self.g(p, rho);
        PriceState { p1: p.p1 + g / 2.0, p2: p.p2 - g / 2.0 }
    }
}

/// Normal `(-1, 1)` of both lines, pointing towards larger `p2 - p1`.
const NORMAL: [f64; 2] = [-1.0, 1.0];
const SIDE_OFFSET: f64 = 1e-7;

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Sliding velocity on a line, if the fields on both sides push into it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlidingVelocity {
    pub f: [f64; 2],
    /// Weight of the field below the line (`p2 - p1` smaller).
    pub lambda: f64,
    /// Component of `f` along the unit normal; zero up to rounding.
    pub normal_component: f64,
}

pub(crate) fn kind_at(p: &PriceState, params: &ModelParams) -> Result<NeKind> {
    Ok(solve_nash_any(p, params)?.kind)
}

/// Fields just below and just above the line at a point on it.
fn side_fields(p: &PriceState, line: SwitchLine, params: &ModelParams) -> Result<([f64; 2], [f64; 2])> {
    let on = line.project(p, params.rho);
    let below = PriceState { p1: on.p1 + SIDE_OFFSET, p2: on.p2 - SIDE_OFFSET };
    let above = PriceState { p1: on.p1 - SIDE_OFFSET, p2: on.p2 + SIDE_OFFSET };
    if !(below.p2 > 0.0 && above.p1 > 0.0) {
        return Err(Error::DegeneratePrice);
    }
    let kb = kind_at(&below, params)?;
    let ka = kind_at(&above, params)?;
    Ok((kind_field(kb, &on, params), kind_field(ka, &on, params)))
}

/// Convex combination of the two side fields that is tangent to the line.
pub fn filippov_velocity(p: &PriceState, line: SwitchLine, params: &ModelParams) -> Result<Option<SlidingVelocity>> {
    let (f_below, f_above) = side_fields(p, line, params)?;
    let nb = dot(NORMAL, f_below);
    let na = dot(NORMAL, f_above);
    let tiny = 1e-14 * (1.0 + f_below[0].abs() + f_below[1].abs() + f_above[0].abs() + f_above[1].abs());
    if !(nb > tiny && na < -tiny) {
        return Ok(None);
    }
    let lambda = na / (na - nb);
    let f = [
        lambda * f_below[0] + (1.0 - lambda) * f_above[0],
        lambda * f_below[1] + (1.0 - lambda) * f_above[1],
    ];
    Ok(Some(SlidingVelocity { f, lambda, normal_component: dot(NORMAL, f) / 2f64.sqrt() }))
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Forward Euler with the field re-evaluated at every step.
    Euler,
    /// Classical Runge-Kutta with switch detection and sliding.
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub horizon: f64,
    pub method: Method,
    /// Smallest step accepted while resolving switches.
    pub dt_min: f64,
    /// Stop when the sup norm of the field falls below this.
    pub stationary_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { dt: 1e-3, horizon: 50.0, method: Method::Rk4, dt_min: 1e-12, stationary_tol: 1e-13 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousSample {
    pub t: f64,
    pub prices: PriceState,
    /// Family whose field drove the step ending here.
    pub kind: NeKind,
    pub sliding: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ContinuousEventKind {
    Switch { from: NeKind, to: NeKind },
    SlidingStart { line: SwitchLine },
    SlidingEnd { line: SwitchLine },
    /// A step would have made a price negative; it was set to zero.
    Clipped { region: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuousEvent {
    pub t: f64,
    pub kind: ContinuousEventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Terminal {
    Stationary { t: f64 },
    Horizon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousTrajectory {
    pub samples: Vec<ContinuousSample>,
    pub events: Vec<ContinuousEvent>,
    pub terminal: Terminal,
}

impl ContinuousTrajectory {
    pub fn last(&self) -> &ContinuousSample {
        self.samples.last().expect("trajectories are never empty")
    }

    /// Events recorded during the step that ends at sample `i`.
    pub fn events_between(&self, t0: f64, t1: f64) -> impl Iterator<Item = &ContinuousEvent> {
        self.events.iter().filter(move |e| e.t > t0 && e.t <= t1)
    }
}

pub fn integrate(
    prices0: &PriceState,
    params: &ModelParams,
    dt: f64,
    horizon: f64,
    method: Method,
) -> Result<ContinuousTrajectory> {
    integrate_with(prices0, params, &IntegratorConfig { dt, horizon, method, ..Default::default() })
}

fn sup(f: [f64; 2]) -> f64 {
    f[0].abs().max(f[1].abs())
}

fn add(p: &PriceState, f: [f64; 2], h: f64) -> PriceState {
    PriceState { p1: p.p1 + h * f[0], p2: p.p2 + h * f[1] }
}

fn rk4<F: Fn(&PriceState) -> [f64; 2]>(p: &PriceState, h: f64, f: F) -> PriceState {
    let k1 = f(p);
    let k2 = f(&add(p, k1, h / 2.0));
    let k3 = f(&add(p, k2, h / 2.0));
    let k4 = f(&add(p, k3, h));
    PriceState {
        p1: p.p1 + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        p2: p.p2 + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    }
}

/// Hold prices at zero when a step would make them negative.
fn clip(p: &mut PriceState, t: f64, events: &mut Vec<ContinuousEvent>) {
    if p.p1 < 0.0 {
        p.p1 = 0.0;
        events.push(ContinuousEvent { t, kind: ContinuousEventKind::Clipped { region: 1 } });
    }
    if p.p2 < 0.0 {
        p.p2 = 0.0;
        events.push(ContinuousEvent { t, kind: ContinuousEventKind::Clipped { region: 2 } });
    }
}

/// Position relative to the two lines: -1 below `-rho`, 0 inside or on, 1 above `rho`.
fn strip_side(p: &PriceState, params: &ModelParams) -> i8 {
    match delta_p_branch(p, params) {
        DeltaPBranch::LtMinusRho => -1,
        DeltaPBranch::GtPlusRho => 1,
        _ => 0,
    }
}

/// Time grid shared by the Euler schemes: `t_n = n dt`, last point at the horizon.
pub(crate) fn time_grid(dt: f64, horizon: f64) -> Vec<f64> {
    let n = (horizon / dt - 1e-9).ceil().max(0.0) as usize;
    let mut ts: Vec<f64> = (0..=n).map(|i| (i as f64 * dt).min(horizon)).collect();
    if let Some(last) = ts.last_mut() {
        *last = horizon;
    }
    ts
}

pub(crate) fn check_integrator_input(prices0: &PriceState, params: &ModelParams, dt: f64, horizon: f64) -> Result<()> {
    params.validate()?;
    prices0.validate()?;
    if prices0.p1 == 0.0 && prices0.p2 == 0.0 {
        return Err(Error::DegeneratePrice);
    }
    if !(dt.is_finite() && dt > 0.0 && horizon.is_finite() && horizon >= 0.0) {
        return Err(Error::Domain(format!("need dt > 0 and horizon >= 0, got dt = {dt}, horizon = {horizon}")));
    }
    Ok(())
}

pub fn integrate_with(prices0: &PriceState, params: &ModelParams, cfg: &IntegratorConfig) -> Result<ContinuousTrajectory> {
    check_integrator_input(prices0, params, cfg.dt, cfg.horizon)?;
    match cfg.method {
        Method::Euler => integrate_euler(prices0, params, cfg),
        Method::Rk4 => integrate_rk4(prices0, params, cfg),
    }
}

fn integrate_euler(p0: &PriceState, params: &ModelParams, cfg: &IntegratorConfig) -> Result<ContinuousTrajectory> {
    let ts = time_grid(cfg.dt, cfg.horizon);
    let mut p = *p0;
    let mut kind = kind_at(&p, params)?;
    let mut samples = vec![ContinuousSample { t: 0.0, prices: p, kind, sliding: false }];
    let mut events = Vec::new();
    let mut terminal = Terminal::Horizon;
    for w in ts.windows(2) {
        let k = kind_at(&p, params)?;
        if k != kind {
            events.push(ContinuousEvent { t: w[0], kind: ContinuousEventKind::Switch { from: kind, to: k } });
            kind = k;
        }
        let f = kind_field(k, &p, params);
        if sup(f) <= cfg.stationary_tol {
            terminal = Terminal::Stationary { t: w[0] };
            break;
        }
        p = add(&p, f, w[1] - w[0]);
        clip(&mut p, w[1], &mut events);
        samples.push(ContinuousSample { t: w[1], prices: p, kind: k, sliding: false });
    }
    Ok(ContinuousTrajectory { samples, events, terminal })
}

enum Mode {
    Smooth(NeKind),
    Sliding(SwitchLine),
}

fn integrate_rk4(p0: &PriceState, params: &ModelParams, cfg: &IntegratorConfig) -> Result<ContinuousTrajectory> {
    let rho = params.rho;
    let mut p = *p0;
    let mut t = 0.0;
    let first = kind_at(&p, params)?;
    let mut mode = Mode::Smooth(first);
    let mut samples = vec![ContinuousSample { t, prices: p, kind: first, sliding: false }];
    let mut events = Vec::new();
    let mut terminal = Terminal::Horizon;
    let mut stalled = 0usize;

    while t < cfg.horizon {
        let h = cfg.dt.min(cfg.horizon - t);
        if h <= 0.0 {
            break;
        }
        match mode {
            Mode::Smooth(kind) => {
                if sup(kind_field(kind, &p, params)) <= cfg.stationary_tol {
                    terminal = Terminal::Stationary { t };
                    break;
                }
                let field = |q: &PriceState| kind_field(kind, q, params);
                let mut trial = rk4(&p, h, field);
                clip(&mut trial, t + h, &mut events);
                let next_kind = kind_at(&trial, params)?;
                if next_kind == kind {
                    p = trial;
                    t += h;
                    stalled = 0;
                    samples.push(ContinuousSample { t, prices: p, kind, sliding: false });
                    continue;
                }

                // Bisect for the first time the family changes.
                let (mut lo, mut hi) = (0.0, 1.0);
                let mut p_hi = trial;
                let mut k_hi = next_kind;
                while (hi - lo) * h > 1e-10 {
                    let mid = 0.5 * (lo + hi);
                    let mut q = rk4(&p, mid * h, field);
                    clip(&mut q, t + mid * h, &mut events);
                    let k = kind_at(&q, params)?;
                    if k == kind {
                        lo = mid;
                    } else {
                        hi = mid;
                        p_hi = q;
                        k_hi = k;
                    }
                }
                let before = p;
                t += hi * h;
                p = p_hi;
                if hi * h < cfg.dt_min.max(1e-10) * 2.0 {
                    stalled += 1;
                    if stalled > 1000 {
                        return Err(Error::StepSizeUnderflow { t });
                    }
                } else {
                    stalled = 0;
                }
                events.push(ContinuousEvent { t, kind: ContinuousEventKind::Switch { from: kind, to: k_hi } });
                mode = Mode::Smooth(k_hi);

                let (s0, s1) = (strip_side(&before, params), strip_side(&p, params));
                if s0 != s1 {
                    let line = if s0.min(s1) < 0 { SwitchLine::MinusRho } else { SwitchLine::PlusRho };
                    let on = line.project(&p, rho);
                    if on.is_positive() && filippov_velocity(&on, line, params)?.is_some() {
                        p = on;
                        mode = Mode::Sliding(line);
                        events.push(ContinuousEvent { t, kind: ContinuousEventKind::SlidingStart { line } });
                    }
                }
                samples.push(ContinuousSample { t, prices: p, kind: kind, sliding: matches!(mode, Mode::Sliding(_)) });
            }
            Mode::Sliding(line) => {
                let v = filippov_velocity(&p, line, params)?;
                let Some(v) = v else {
                    // Leave towards the side whose field points away from the line.
                    let (f_below, _) = side_fields(&p, line, params)?;
                    let dir = if dot(NORMAL, f_below) <= 0.0 { -1.0 } else { 1.0 };
                    p = PriceState { p1: p.p1 - dir * SIDE_OFFSET, p2: p.p2 + dir * SIDE_OFFSET };
                    events.push(ContinuousEvent { t, kind: ContinuousEventKind::SlidingEnd { line } });
                    mode = Mode::Smooth(kind_at(&p, params)?);
                    continue;
                };
                if sup(v.f) <= cfg.stationary_tol {
                    terminal = Terminal::Stationary { t };
                    break;
                }
                let field = |q: &PriceState| {
                    filippov_velocity(&line.project(q, rho), line, params)
                        .ok()
                        .flatten()
                        .map_or(v.f, |w| w.f)
                };
                let mut next = line.project(&rk4(&p, h, field), rho);
                clip(&mut next, t + h, &mut events);
                p = next;
                t += h;
                let kind = kind_at(&p, params)?;
                samples.push(ContinuousSample { t, prices: p, kind, sliding: true });
            }
        }
    }
    Ok(ContinuousTrajectory { samples, events, terminal })
}

// ---------------------------------------------------------------------------
// Stationary set and stability
// ---------------------------------------------------------------------------

/// Sampled stationary set: the zone III fixed point and the two arcs
/// leaving it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarySet {
    pub e_tilde: PriceState,
    /// Points `(h3(p2), p2)` for `p2` in `[Y2/q2, p2_star)`.
    pub h3: Vec<PriceState>,
    /// Points `(p1, h4(p1))` for `p1` in `[Y1/q1, p1_star)`.
    pub h4: Vec<PriceState>,
}

pub fn stationary_set(params: &ModelParams, resolution: usize) -> Result<StationarySet> {
    let loci = price_space_loci(params)?;
    if resolution == 0 {
        return Err(Error::Domain("resolution must be positive".into()));
    }
    let n = resolution as f64;
    let (a4, b4) = loci.h4_range();
    let (a3, b3) = loci.h3_range();
    let mut h4 = Vec::with_capacity(resolution);
    let mut h3 = Vec::with_capacity(resolution);
    for i in 0..resolution {
        let p1 = a4 + (b4 - a4) * i as f64 / n;
        h4.push(PriceState { p1, p2: loci.h4(p1)? });
        let p2 = a3 + (b3 - a3) * i as f64 / n;
        h3.push(PriceState { p1: loci.h3(p2)?, p2 });
    }
    Ok(StationarySet { e_tilde: loci.e_tilde(), h3, h4 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub radius: f64,
    pub n_probes: usize,
    pub dt: f64,
    pub horizon: f64,
    /// Restrict start angles to this range (radians); full circle if `None`.
    pub sector: Option<(f64, f64)>,
    /// Excursions up to this multiple of the radius count as bounded.
    pub bound_factor: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self { radius: 1e-2, n_probes: 16, dt: 1e-2, horizon: 40.0, sector: None, bound_factor: 10.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub start: PriceState,
    pub limit: PriceState,
    /// Largest distance from the probed point along the path.
    pub max_excursion: f64,
    pub terminal: Terminal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub point: PriceState,
    pub probes: Vec<ProbeOutcome>,
    pub max_excursion: f64,
    /// Every path stayed within `bound_factor * radius`.
    pub bounded: bool,
    /// Every path returned to the probed point.
    pub asymptotic: bool,
}

impl StabilityReport {
    pub fn limit_points(&self) -> Vec<PriceState> {
        self.probes.iter().map(|p| p.limit).collect()
    }
}

/// Integrate from starts spread on a circle around `point`.
pub fn stability_probe(point: &PriceState, params: &ModelParams, cfg: &ProbeConfig) -> Result<StabilityReport> {
    if !(cfg.radius > 0.0 && cfg.n_probes > 0) {
        return Err(Error::Domain("probe needs radius > 0 and at least one start".into()));
    }
    let (a0, a1) = cfg.sector.unwrap_or((0.0, std::f64::consts::TAU));
    let full = cfg.sector.is_none();
    let mut probes = Vec::with_capacity(cfg.n_probes);
    for i in 0..cfg.n_probes {
        let frac = if full || cfg.n_probes == 1 {
            i as f64 / cfg.n_probes as f64
        } else {
            i as f64 / (cfg.n_probes - 1) as f64
        };
        let theta = a0 + (a1 - a0) * frac;
        let start = PriceState {
            p1: (point.p1 + cfg.radius * theta.cos()).max(0.0),
            p2: (point.p2 + cfg.radius * theta.sin()).max(0.0),
        };
        let tr = integrate(&start, params, cfg.dt, cfg.horizon, Method::Rk4)?;
        let max_excursion = tr.samples.iter().map(|s| s.prices.distance(point)).fold(0.0, f64::max);
        probes.push(ProbeOutcome { start, limit: tr.last().prices, max_excursion, terminal: tr.terminal });
    }
    let max_excursion = probes.iter().map(|p| p.max_excursion).fold(0.0, f64::max);
    let bounded = max_excursion <= cfg.bound_factor * cfg.radius;
    let asymptotic = probes.iter().all(|p| p.limit.distance(point) <= 1e-3 * cfg.radius);
    Ok(StabilityReport { point: *point, probes, max_excursion, bounded, asymptotic })
}

/// Exact zone III solution, valid while the path stays in zone III.
pub fn zone_three_solution(prices0: &PriceState, params: &ModelParams, t: f64) -> PriceState {
    let e = params.e_tilde();
    let decay = (-t).exp();
    PriceState { p1: (prices0.p1 - e.p1) * decay + e.p1, p2: (prices0.p2 - e.p2) * decay + e.p2 }
}

// ---------------------------------------------------------------------------
// Phase portrait
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitPoint {
    pub prices: PriceState,
    pub f: [f64; 2],
    pub zone: String,
}

/// Field on a rectangular grid of positive prices, `n1 x n2` points.
pub fn phase_portrait(
    params: &ModelParams,
    p1_range: (f64, f64),
    p2_range: (f64, f64),
    n1: usize,
    n2: usize,
) -> Result<Vec<PortraitPoint>> {
    if !(p1_range.0 > 0.0 && p2_range.0 > 0.0 && p1_range.0 <= p1_range.1 && p2_range.0 <= p2_range.1) {
        return Err(Error::Domain("portrait ranges must be positive and ordered".into()));
    }
    if n1 == 0 || n2 == 0 {
        return Err(Error::Domain("portrait needs at least one point per axis".into()));
    }
    let at = |(lo, hi): (f64, f64), i: usize, n: usize| {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            let prices = PriceState { p1: at(p1_range, i, n1), p2: at(p2_range, j, n2) };
            let eq = solve_nash_any(&prices, params)?;
            out.push(PortraitPoint {
                prices,
                f: drift_from_profile(&eq.profile, &prices, params),
                zone: eq.zone_tag(),
            });
        }
    }
    Ok(out)
}
