use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `kmax - c*W` fell below the singularity guard.
    #[error("effective carrying capacity {capacity:e} below guard at W = {w}")]
    SingularCarryingCapacity { capacity: f64, w: f64 },

    #[error("non-finite value encountered {context}")]
    NonFiniteState { context: String },

    #[error("parameter `{name}` = {value} is invalid: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("t = {t} lies outside the schedule coverage [{start}, {end}]")]
    OutOfSchedule { t: f64, start: f64, end: f64 },

    #[error("invalid solver configuration: {0}")]
    InvalidSolverConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("step budget of {max_steps} steps exhausted at t = {t}")]
    StepBudgetExceeded { t: f64, max_steps: usize },

    #[error("step size {h:e} fell below h_min at t = {t}")]
    StepUnderflow { t: f64, h: f64 },

    #[error("no interior equilibrium: {0}")]
    NoInteriorEquilibrium(String),

    #[error("found {found} oscillations in the tail window, need at least {needed}")]
    InsufficientOscillations { found: usize, needed: usize },

    #[error("sweep window [{from}, {to}] around breakpoint {breakpoint} is not covered by the trajectory")]
    WindowOutOfRange { breakpoint: f64, from: f64, to: f64 },
}
