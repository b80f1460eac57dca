use thiserror::Error;

/// Errors raised across the library.
///
/// Element indices carried inside variants are 0-based; the `Display`
/// output converts them to the 1-based convention used in files and on
/// the command line.
#[derive(Debug, Error)]
pub enum Error {
    #[error("relation contains a cycle through elements {} and {}", .a + 1, .b + 1)]
    Cycle { a: usize, b: usize },

    #[error("element {} is out of range for a poset on {n} elements", .index + 1)]
    IndexOutOfRange { index: usize, n: usize },

    #[error("size mismatch: {left} vs {right} elements")]
    SizeMismatch { left: usize, right: usize },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid size {k} at position {position}: sizes must be at least 1")]
    InvalidSize { position: usize, k: usize },

    #[error("{what} is {value}, above the configured limit {limit}")]
    LimitExceeded {
        what: &'static str,
        value: String,
        limit: String,
    },

    #[error("N-blocks have no exact series-parallel recurrence")]
    UnsupportedNBlock,

    #[error("point is not consistent with the order: y[{}] > y[{}]", .i + 1, .j + 1)]
    NotConsistent { i: usize, j: usize },

    #[error("point lies outside the chain polytope: {0}")]
    NotInChainPolytope(String),

    #[error("ranks do not form a linear extension of the poset")]
    NotAnExtension,

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("adaptive quadrature failed (error estimate {error_estimate:e})")]
    QuadratureFailure { error_estimate: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
