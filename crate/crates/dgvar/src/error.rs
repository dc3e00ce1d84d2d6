use thiserror::Error;

/// Errors surfaced by the library. Numerical pathologies are reported, never
/// silently absorbed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DgvarError {
    #[error("covariance matrix is not positive definite (pivot {pivot:e} at row {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("symmetric eigensolver did not converge within {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("moment generating function is infinite at every probed exponent u > 0")]
    EmptyDomain,

    #[error("all eigenvalues of sigma*gamma are zero; no polynomial decay bound exists")]
    AllEigenvaluesZero,

    #[error("hurwitz zeta exponent must exceed 1, got {0}")]
    InvalidExponent(f64),

    #[error("required series length {required:e} exceeds the cap {cap}; the epsilon/data combination is computationally infeasible")]
    SchemeTooLarge { required: f64, cap: usize },

    #[error("evaluation point {x} lies outside the certified range [-{half_range}, {half_range}]")]
    OutOfRange { x: f64, half_range: f64 },

    #[error("epsilon {epsilon} is too loose for gamma {gamma}: need epsilon < min(gamma, 1-gamma)/2")]
    ToleranceTooLoose { gamma: f64, epsilon: f64 },

    #[error("epsilon must lie in (0, 0.1), got {0}")]
    EpsilonOutOfRange(f64),

    #[error("model is degenerate: the portfolio value change is almost surely constant")]
    DegenerateModel,

    #[error("sample too small: ceil(M*gamma) = {index} exceeds M = {samples}")]
    SampleTooSmall { index: usize, samples: usize },

    #[error("too few repetitions: floor(rho*R/2) must be at least 1")]
    TooFewRepetitions,

    #[error("invalid model: {0}")]
    InvalidModel(String),
}

pub type Result<T> = std::result::Result<T, DgvarError>;
