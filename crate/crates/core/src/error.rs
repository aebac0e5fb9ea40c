//! Error types shared across the toolkit.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid parameter (wrong sign, wrong mode, wrong size).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The flow speed 1/H is undefined: the surface lost strict mean convexity.
    #[error("lost strict mean convexity at t = {t}: min H = {min_h:.6e}")]
    NonMeanConvex { t: f64, min_h: f64 },

    /// A state quantity left the representable floating-point range.
    #[error("numerical overflow at t = {t}")]
    NumericalOverflow { t: f64 },

    /// A trace-based report needs more records than were provided.
    #[error("insufficient trace: {0}")]
    InsufficientTrace(String),

    /// The linearized mass integrand is not trustworthy this far from the
    /// reference metric.
    #[error("linearization range exceeded at r = {r}: |tr e| = {tr_e:.3e}")]
    LinearizationRange { r: f64, tr_e: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
