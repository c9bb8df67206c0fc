//! Two-region strategic trade model.
//!
//! Two regions each produce one good and host one consumer. Consumers order
//! from both regions; imports carry a transport cost. Given prices, the
//! ordering game has a Nash equilibrium that depends on where incomes sit
//! relative to a handful of lines ([`zones`]). Prices then adjust to excess
//! demand, in discrete steps ([`discrete`]), in continuous time
//! ([`continuous`]) or under multiplicative noise ([`stochastic`]).
//!
//! ```
//! use bitrade::{solve_nash, ModelParams, PriceState, ZoneLabel};
//!
//! let params = ModelParams::new(4.0, 6.0, 2.0, 3.0, 0.5).unwrap();
//! let eq = solve_nash(&PriceState::new(1.0, 1.0).unwrap(), &params).unwrap();
//! assert_eq!(eq.zone, ZoneLabel::III);
//! assert_eq!(eq.payoffs, (2.0, 3.0));
//! ```

pub mod cli;
pub mod continuous;
pub mod discrete;
pub mod equilibrium;
pub mod error;
pub mod model;
pub mod rng;
pub mod sampling;
pub mod stochastic;
pub mod zones;

pub use equilibrium::{
    best_reply_1, best_reply_2, brute_force_nash, check_fixed_point, check_lemmas, solve_nash, solve_nash_any,
    EquilibriumResult, Frame, NeKind,
};
pub use error::{Error, Result};
pub use model::{
    aggregates, feasible, payoff1, payoff2, swap_regions, theorem_aggregates, Aggregates, ModelParams, PriceState,
    StrategyProfile, TheoremAggregates, EPS,
};
pub use zones::{
    case_relation, classify, delta_p_branch, line_values, price_space_loci, CaseRelation, DeltaPBranch,
    LineResiduals, PriceSpaceLoci, ZoneLabel,
};
