//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by lattice, series, family and polynomial operations.
#[derive(Debug, Clone, Error)]
pub enum QError {
    /// The requested value is not representable in the exact field (e.g. an
    /// infinite product, or a q-power with a non-half-integer exponent).
    #[error("unsupported exact-mode input: {0}")]
    UnsupportedExactInput(String),

    /// Evaluation hit (or came too close to) a pole.
    #[error("pole: {0}")]
    Pole(String),

    /// A non-terminating series whose terms do not decay.
    #[error("divergent series: {0}")]
    Divergence(String),

    /// Adaptive truncation could not certify the requested tail bound.
    #[error("truncation: {0}")]
    Truncation(String),

    /// A documented side condition of an identity or operation is violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A grid function is too short for the requested difference operator.
    #[error("support too small: {0}")]
    SupportTooSmall(String),

    /// A constructed norm or determinant came out non-positive, signalling an
    /// inconsistent moment sequence upstream.
    #[error("moment inconsistency: {0}")]
    MomentInconsistency(String),

    /// A pointwise fit (eigenvalue, proportionality constant) has no usable
    /// sample point.
    #[error("fit failed: {0}")]
    Fit(String),

    /// Malformed textual input (family descriptors, rational literals).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QError>;
