//! Crate-wide error type.
//!
//! Errors split into two kinds mirroring the CLI exit contract: `Validation`
//! for malformed or out-of-contract inputs, `Numeric` for computations that
//! started from valid inputs but could not produce a trustworthy answer.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by callers that map errors to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Input violated a precondition (bad polynomial, non-expansive matrix,
    /// malformed cylinder, ...).
    Validation,
    /// A numeric procedure failed or produced evidence of an invalid input
    /// (root refinement stalled, determinant left the admissible band, ...).
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("polynomial is not monic (leading coefficient {0})")]
    NotMonic(String),

    #[error("polynomial must have degree >= 1")]
    DegreeZero,

    #[error(
        "root refinement did not converge; worst residual {worst_residual:.3e} (limit {limit:.3e})"
    )]
    RootRefinement { worst_residual: f64, limit: f64 },

    #[error("not a Pisot number: {0}")]
    NotPisot(String),

    #[error("Pisot certification indeterminate: root modulus {modulus} within margin of 1")]
    PisotIndeterminate { modulus: f64 },

    #[error("matrix is not expansive: eigenvalue modulus {0} <= 1 + margin")]
    NotExpansive(f64),

    #[error("theta {theta} does not exceed the conjugate maximum {conjugate_max}")]
    ThetaTooSmall { theta: f64, conjugate_max: f64 },

    #[error("zero factor at index {index} ({value:.3e}) in product floor")]
    ZeroFactor { index: usize, value: f64 },

    #[error("kernel invalid: {0}")]
    KernelInvalid(String),

    #[error("kernel spectrum violation: {0}")]
    SpectrumViolation(String),

    #[error("cylinder {0}")]
    Cylinder(String),

    #[error("determinant {value:.6e} outside [0,1] band for cylinder probability")]
    ProbabilityBand { value: f64 },

    #[error("conditional probability {value:.6e} outside [0,1] band while sampling")]
    ConditionalBand { value: f64 },

    #[error(
        "truncation ladder did not converge by order {max_order} (last delta {last_delta:.3e})"
    )]
    NoConvergence { max_order: usize, last_delta: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_)
            | Error::Invalid(_)
            | Error::NotMonic(_)
            | Error::DegreeZero
            | Error::NotExpansive(_)
            | Error::ThetaTooSmall { .. }
            | Error::KernelInvalid(_)
            | Error::Cylinder(_)
            | Error::NotPisot(_) => ErrorKind::Validation,
            Error::RootRefinement { .. }
            | Error::PisotIndeterminate { .. }
            | Error::SpectrumViolation(_)
            | Error::ZeroFactor { .. }
            | Error::ProbabilityBand { .. }
            | Error::ConditionalBand { .. }
            | Error::NoConvergence { .. }
            | Error::Numeric(_)
            | Error::Io(_) => ErrorKind::Numeric,
        }
    }
}
