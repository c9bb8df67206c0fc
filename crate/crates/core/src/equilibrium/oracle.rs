//! Grid search equilibrium, used to cross-check the closed forms.
//!
//! Each consumer's budget set is discretised and replies are found by
//! exhaustive search. Replies alternate until the profile repeats.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{payoff1, payoff2, ModelParams, PriceState, StrategyProfile};

const MAX_SWEEPS: usize = 100;
const PAYOFF_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub profile: StrategyProfile,
    pub payoffs: (f64, f64),
    pub sweeps: usize,
    /// Payoff tolerance implied by the grid spacing.
    pub tolerance: f64,
}

struct Grid {
    home_max: f64,
    foreign_max: f64,
    p_home: f64,
    p_import: f64,
    q_home: f64,
    n: usize,
    triangle: bool,
}

impl Grid {
    fn new(p_home: f64, p_import: f64, income: f64, q_home: f64, n: usize) -> Self {
        let triangle = p_home > 0.0;
        let home_max = if triangle { income / p_home } else { q_home };
        Self { home_max, foreign_max: income / p_import, p_home, p_import, q_home, n, triangle }
    }

    fn diameter(&self) -> f64 {
        self.home_max.hypot(self.foreign_max)
    }

    /// Best point for the given amount left abroad: highest payoff, then
    /// lowest expenditure, then largest home order.
    fn best(&self, left_abroad: f64) -> (f64, f64) {
        let n = self.n as f64;
        let left = left_abroad.max(0.0);
        let mut best = (f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..=self.n {
            let home = self.home_max * i as f64 / n;
            let jmax = if self.triangle { self.n - i } else { self.n };
            for j in 0..=jmax {
                let foreign = self.foreign_max * j as f64 / n;
                let u = home.min(self.q_home) + foreign.min(left);
                let cost = home * self.p_home + foreign * self.p_import;
                let better = if u > best.0 + PAYOFF_TIE {
                    true
                } else if u >= best.0 - PAYOFF_TIE {
                    cost < best.1 - PAYOFF_TIE || (cost <= best.1 + PAYOFF_TIE && home > best.2)
                } else {
                    false
                };
                if better {
                    best = (u, cost, home, home, foreign);
                }
            }
        }
        (best.3, best.4)
    }
}

/// Equilibrium found by alternating grid best replies.
///
/// Requires at most one zero price and `grid_n >= 1`.
pub fn brute_force_nash(prices: &PriceState, params: &ModelParams, grid_n: usize) -> Result<OracleResult> {
    params.validate()?;
    prices.validate()?;
    if grid_n == 0 {
        return Err(Error::Domain("grid_n must be positive".into()));
    }
    if prices.p1 == 0.0 && prices.p2 == 0.0 {
        return Err(Error::DegeneratePrice);
    }
    let g1 = Grid::new(prices.p1, prices.p2_import(params), params.y1, params.q1, grid_n);
    let g2 = Grid::new(prices.p2, prices.p1_import(params), params.y2, params.q2, grid_n);
    let tolerance = 2.0 * g1.diameter().max(g2.diameter()) / grid_n as f64;

    let mut s = StrategyProfile::default();
    for sweep in 1..=MAX_SWEEPS {
        let (alpha, beta) = g1.best(params.q2 - s.delta);
        let (delta, gamma) = g2.best(params.q1 - alpha);
        let next = StrategyProfile::new(alpha, beta, gamma, delta);
        if next == s {
            return Ok(OracleResult {
                profile: s,
                payoffs: (payoff1(&s, params), payoff2(&s, params)),
                sweeps: sweep,
                tolerance,
            });
        }
        s = next;
    }
    Err(Error::NoConvergence { sweeps: MAX_SWEEPS })
}
