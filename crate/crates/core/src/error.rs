use thiserror::Error;

/// Errors produced by the model, solvers and integrators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("strategy profile violates a budget constraint")]
    InfeasibleProfile,

    #[error("operation undefined at a zero price")]
    DegeneratePrice,

    #[error(
        "orientation violated: p2*q2 = {p2q2} exceeds p1*q1 = {p1q1}; relabel the regions with swap_regions"
    )]
    OrientationViolated { p1q1: f64, p2q2: f64 },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("best-response iteration did not reach a fixed point after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("state left the admissible box at t = {t}")]
    NonFinite { t: f64 },

    #[error("step size fell below the minimum at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
