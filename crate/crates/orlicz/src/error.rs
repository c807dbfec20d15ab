//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by construction, evaluation, generation, and sampling.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type the
/// offending computation ran in; they exist for diagnostics, not for further
/// arithmetic.
#[derive(Error, Debug)]
pub enum OrliczError {
    /// A parameter is outside its admissible range (for example a power
    /// exponent below one, or an equivalence constant not above one).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An input slice contained a NaN or infinity.
    #[error("non-finite input in {0}")]
    NonFiniteInput(&'static str),

    /// Two sequences that must be index-aligned have different lengths.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// An operation that requires `\int_0^\infty x \, dM'(x) = 1` received a
    /// function whose integral deviates from one beyond tolerance.
    #[error("function is not normalized: integral is {integral}")]
    NotNormalized { integral: f64 },

    /// No kink position can bring the normalization integral to one.
    #[error("function cannot be normalized: supremum of the integral is {supremum}")]
    NonNormalizable { supremum: f64 },

    /// An argument lies beyond the range on which the function body is
    /// defined (tabulated and smoothed bodies cannot be extended outward).
    #[error("argument {value} exceeds the representable domain (max {max})")]
    DomainExceeded { value: f64, max: f64 },

    /// A derived probability density dipped below zero by more than the
    /// clamping tolerance.
    #[error("density is negative: {value} at {at}")]
    NegativeDensity { at: f64, value: f64 },

    /// The second derivative of a candidate function is negative somewhere.
    #[error("convexity violation: second derivative {value} at {at}")]
    ConvexityViolation { at: f64, value: f64 },

    /// Total probability mass of a tail or density deviates from one.
    #[error("total probability mass {mass} deviates from 1 beyond tolerance")]
    MassMismatch { mass: f64 },

    /// A tail fails to decay (or to integrate) and cannot drive the
    /// requested construction.
    #[error("tail does not decay to zero fast enough: {0}")]
    NonIntegrableTail(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: residual error estimate {error}")]
    QuadratureNonConvergence { error: f64 },

    /// A mathematical hypothesis required by the requested operation does
    /// not hold for the given inputs.
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    /// A function specification string could not be parsed.
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// Reading an external resource (a spline CSV, for instance) failed.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, OrliczError>;
