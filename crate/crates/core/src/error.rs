use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh needs at least 2 cells, got {0}")]
    TooFewCells(usize),

    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("functions live on different meshes ({left} vs {right} cells)")]
    MeshMismatch { left: usize, right: usize },

    #[error("function must vanish at the boundary (values {first}, {last})")]
    NonzeroBoundary { first: f64, last: f64 },

    #[error("operation requires a Dirichlet function")]
    NotDirichlet,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(&'static str),

    #[error("solver did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("time step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("sample path {path} failed: {source}")]
    PathFailed {
        path: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("step index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("test process and state path were driven by different increments")]
    CouplingMismatch,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True when the error originates in a nonlinear solve, possibly wrapped
    /// in step or path context.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::NoConvergence { .. } => true,
            Error::StepFailed { source, .. } | Error::PathFailed { source, .. } => {
                source.is_solver_failure()
            }
            _ => false,
        }
    }
}
