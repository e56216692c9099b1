//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by domain construction, evaluation, and the solvers.
#[derive(Debug, Error)]
pub enum HypoError {
    /// Two functions were combined that do not live on the same grid domain.
    #[error("grid domains do not match")]
    DomainMismatch,

    /// A point was queried that is not a member node of the domain.
    #[error("point {0:?} is not a member node of the domain")]
    NonMemberNode(Vec<f64>),

    /// A function ended up with no finite value anywhere.
    #[error("hypograph is empty: no node carries a finite value")]
    EmptyHypograph,

    /// The domain description itself is invalid.
    #[error("invalid grid domain: {0}")]
    InvalidDomain(String),

    /// A value outside the permitted extended-real range (NaN or +inf).
    #[error("invalid value: {0}")]
    InvalidValue(String),

    /// An operation's stated precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A constraint system admits no feasible point.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Enumeration would exceed the configured cap.
    #[error("enumeration of {count} members exceeds cap {cap}")]
    CountCapExceeded { count: u128, cap: u64 },

    /// Malformed CSV input, with a line/field diagnostic.
    #[error("parse error at line {line}, field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },

    /// Malformed or mismatched JSON document.
    #[error("schema error: {0}")]
    Schema(String),

    /// The iterative solver could not produce a finite-objective iterate.
    #[error("solver failed: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, HypoError>;
