use thiserror::Error;

/// Errors raised by the numerical and physics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CasimirError {
    /// An argument lies outside the domain of the function.
    #[error("{func}: argument out of domain ({detail})")]
    Domain { func: &'static str, detail: String },

    /// The result would not be representable as a finite double.
    #[error("{func}: result overflows double precision ({detail})")]
    Overflow { func: &'static str, detail: String },

    /// A model or configuration parameter is invalid.
    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParameter { name: &'static str, detail: String },

    /// Adaptive quadrature ran out of subdivisions before reaching the tolerance.
    #[error(
        "quadrature did not converge: partial value {value:e}, error estimate {error_estimate:e} after {evaluations} evaluations"
    )]
    QuadratureNotConverged {
        value: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    /// A Matsubara summand did not decay within the term budget.
    #[error("Matsubara summand does not decay: {terms} terms summed, last term {last_term:e}")]
    NonDecaying { terms: usize, last_term: f64 },

    /// `1 - A` is singular or has a non-positive determinant, i.e. the
    /// round-trip operator is not a contraction. Physically this signals
    /// touching or interpenetrating bodies.
    #[error("round-trip operator is not a contraction: {0}")]
    NotContraction(String),

    /// The requested truncation exceeds the supported coefficient tables.
    #[error("truncation order {requested} exceeds the supported maximum {supported}")]
    TruncationTooLarge { requested: usize, supported: usize },
}

pub type Result<T> = std::result::Result<T, CasimirError>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> CasimirError {
    CasimirError::Domain {
        func,
        detail: detail.into(),
    }
}

pub(crate) fn invalid(name: &'static str, detail: impl Into<String>) -> CasimirError {
    CasimirError::InvalidParameter {
        name,
        detail: detail.into(),
    }
}
