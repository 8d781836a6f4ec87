use thiserror::Error;

pub type Result<T> = std::result::Result<T, SgmError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SgmError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown function `{name}` (valid: {valid})")]
    UnknownFunction { name: String, valid: String },

    #[error("point {point:?} lies outside the domain of `{objective}`")]
    OutOfDomain { objective: String, point: Vec<f64> },

    #[error("no gradient available for `{0}`; use best-neighbor labeling")]
    GradientUnavailable(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    Usage(String),

    /// Evaluation budget exhausted. Solvers catch this and stop with the
    /// best result found so far.
    #[error("evaluation budget of {budget} exhausted")]
    BudgetExceeded { budget: u64 },

    /// Bisection would push the grid step below 2^-40 of the initial extent.
    #[error("refinement limit reached at level {level}")]
    RefinementLimit { level: u32 },

    #[error("invalid data: {0}")]
    Data(String),
}

impl SgmError {
    pub fn is_budget(&self) -> bool {
        matches!(self, SgmError::BudgetExceeded { .. })
    }
}
