use thiserror::Error;

/// Errors surfaced by the library.
///
/// `Input`-class variants describe bad user data (malformed values, invalid
/// structure constants, out-of-range indices). `Internal` marks a broken
/// invariant inside the engine itself and is never expected on any input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse {input:?} as a Gaussian rational: {reason}")]
    ParseValue { input: String, reason: String },

    #[error("invalid algebra: {0}")]
    SpecValidation(String),

    #[error("invalid JSON: {0}")]
    Json(String),

    #[error("unknown example {0:?}")]
    UnknownExample(String),

    #[error("bad argument: {0}")]
    BadArgument(String),

    #[error("deformed frame is not invertible")]
    FrameNotInvertible,

    #[error("deformation is not integrable: {0}")]
    NotIntegrable(String),

    #[error("deformation is not abelian: {0}")]
    NotAbelian(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by user input rather than engine bugs.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}
