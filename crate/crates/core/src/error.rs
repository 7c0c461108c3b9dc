use thiserror::Error;

/// Errors produced by the vortex library.
#[derive(Debug, Error)]
pub enum VortexError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sampling violation: {0}")]
    Sampling(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("ambiguous topological charge: {0}")]
    AmbiguousCharge(String),
    #[error("division singularity: {0}")]
    DivisionSingularity(String),
    #[error("diffraction orders overlap: {0}")]
    OrderOverlap(String),
    #[error("no crossing found: {0}")]
    NoCrossing(String),
    #[error("transverse helicity undefined: {0}")]
    HelicityUndefined(String),
    #[error("malformed data: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl VortexError {
    /// True when the error comes from rejected input rather than from a
    /// numerical breakdown during computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            VortexError::InvalidParameter(_)
                | VortexError::Sampling(_)
                | VortexError::GridMismatch(_)
                | VortexError::OrderOverlap(_)
                | VortexError::Format(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, VortexError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(VortexError::InvalidParameter(msg.into()))
}
