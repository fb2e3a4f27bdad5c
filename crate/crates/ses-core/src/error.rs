use thiserror::Error;

/// Errors surfaced by the solvers in this crate.
///
/// Validation-class errors ([`Error::Domain`], [`Error::Precondition`]) mean
/// the inputs were rejected before any numerics ran; the remaining variants
/// report numerical failures that were detected rather than silently returned.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("precondition violated in {op}: {msg}")]
    Precondition { op: &'static str, msg: String },

    #[error("eigensolver failure in {op}: {msg}")]
    Eigensolver { op: &'static str, msg: String },

    #[error("quadrature did not converge in {op}: {msg}")]
    Quadrature { op: &'static str, msg: String },

    #[error("overlap matrix numerically singular: {msg}")]
    SingularOverlap { msg: String },

    #[error("charge collision in {op}: {msg}")]
    ChargeCollision { op: &'static str, msg: String },

    #[error("iteration did not converge in {op}: {msg}")]
    NonConvergence { op: &'static str, msg: String },
}

impl Error {
    /// True for input-validation failures (as opposed to numerical ones).
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Domain { .. } | Error::Precondition { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
