use alloc::string::String;

/// Everything that can go wrong inside the physics core.
///
/// Parameter errors carry the documented configuration key so front ends can
/// point at the offending line; numerical errors carry the probe detuning or
/// drive field at which they occurred.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{key}: negative rate ({value})")]
    NegativeRate { key: &'static str, value: f64 },
    #[error("{key}: rate must be strictly positive")]
    ZeroRate { key: &'static str },
    #[error("{key}: coupling must be non-negative (got {value})")]
    NegativeCoupling { key: &'static str, value: f64 },
    #[error("{key}: value is not finite")]
    NonFinite { key: &'static str },
    #[error("{key}: inconsistent with the mode and drive frequencies ({given} vs {implied})")]
    InconsistentDetuning {
        key: &'static str,
        given: f64,
        implied: f64,
    },
    #[error("{key}: required in {mode} coupling mode")]
    MissingForMode { key: &'static str, mode: &'static str },
    #[error("{key}: {reason}")]
    InvalidValue {
        key: &'static str,
        reason: &'static str,
    },
    #[error("steady state did not converge after {iterations} iterations (residual {residual:e}{})",
        field_tesla.map(|b| alloc::format!(", B = {b:e} T")).unwrap_or_default())]
    NonConvergence {
        iterations: usize,
        residual: f64,
        field_tesla: Option<f64>,
    },
    #[error("singular denominator in the probe response at delta = {delta:e} rad/s")]
    SingularDenominator { delta: f64 },
    #[error("fluctuation matrix is singular at delta = {delta:e} rad/s")]
    SingularMatrix { delta: f64 },
    #[error("fluctuation matrix is ill-conditioned at delta = {delta:e} rad/s (condition {condition:e})")]
    IllConditioned { delta: f64, condition: f64 },
    #[error("input series is empty")]
    EmptyInput,
    #[error("input grid is not sorted ascending")]
    Unsorted,
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("window at delta = {center:e} has no flanking peak on both sides")]
    UndefinedAsymmetry { center: f64 },
    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),
    #[error("sweep needs {requested} evaluations, budget is {budget}")]
    BudgetExceeded { requested: usize, budget: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
