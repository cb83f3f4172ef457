use thiserror::Error;

/// Errors raised by space construction, functional evaluation and extension.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid subspace: {0}")]
    InvalidSubspace(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vector lies outside the functional's domain (residual {residual:.3e})")]
    NotInDomain { residual: f64 },

    #[error("functional is unbounded: it does not vanish on the kernel of the anchored seminorm (|T(k, b)| = {violation:.3e})")]
    Unbounded { violation: f64 },

    #[error("closed-form norm is unavailable for {0}")]
    ClosedFormUnavailable(&'static str),

    #[error("bound M = {bound} is below the functional norm {norm}; the extension interval may be empty")]
    Infeasible { bound: f64, norm: f64 },

    #[error("extension interval is empty: s = {lower}, i = {upper}")]
    EmptyInterval { lower: f64, upper: f64 },

    #[error("adjoined vector already lies in the domain")]
    AlreadyInDomain,

    #[error("invalid completion order: {0}")]
    InvalidCompletion(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("empty sequence")]
    EmptySequence,

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
