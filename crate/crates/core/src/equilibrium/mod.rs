//! Best replies, closed-form equilibria and a grid-search oracle.

pub mod best_reply;
pub mod nash;
pub mod oracle;

pub use best_reply::{best_reply_1, best_reply_2, BestReply, SelectionRule, TableCell};
pub use nash::{
    check_fixed_point, check_lemmas, closed_form_profile, ne_kind, solve_nash, solve_nash_any, EquilibriumResult,
    FixedPointReport, Frame, LemmaReport, NeKind,
};
pub use oracle::{brute_force_nash, OracleResult};
