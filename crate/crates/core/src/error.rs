use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree {degree} exceeds basis capacity {capacity}")]
    DegreeOutOfRange { degree: usize, capacity: usize },

    #[error("argument {0} lies outside the reference interval [0, 1]")]
    OutsideUnitInterval(f64),

    #[error("invalid quadrature abscissae: {0}")]
    InvalidAbscissae(String),

    #[error("Newton iteration for the roots of P_{degree} did not converge")]
    RootFinding { degree: usize },

    #[error("polynomial degree s = {s} must satisfy 1 <= s <= k = {k}")]
    InvalidDegree { k: usize, s: usize },

    #[error("invalid solver settings: {0}")]
    InvalidSettings(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("nonlinear iteration did not converge in {iterations} iterations (last update {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("non-finite value produced by the vector field")]
    NonFinite,

    #[error("singular linear system in {0}")]
    Singular(&'static str),

    #[error("problem domain violation: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("missing history segment for step {0}")]
    MissingHistory(i64),

    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown problem id `{0}`")]
    UnknownProblem(String),

    #[error("{0}")]
    Config(String),
}

impl Error {
    /// Strips [`Error::StepFailed`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::StepFailed { source, .. } => source.root(),
            other => other,
        }
    }
}
