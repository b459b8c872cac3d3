//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by mode construction, state algebra, chain assembly and
/// the sweep/optimization front ends.
#[derive(Debug, Error)]
pub enum EosError {
    /// An input value lies outside the physical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A frequency, bandwidth or index exceeds the supported range.
    #[error("range error: {0}")]
    Range(String),

    /// Two quantities defined on different frequency grids were combined.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// An invalid experiment or chain configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A constrained optimization has no feasible point.
    #[error("infeasible constraint: {0}")]
    Infeasible(String),

    /// A numeric invariant (uncertainty relation, positivity, symmetry)
    /// failed beyond tolerance.
    #[error("numeric invariant violated: {0}")]
    Invariant(String),

    /// A detection operator cannot be represented on the supplied mode basis.
    #[error("mode basis too small: {0}")]
    BasisTooSmall(String),

    /// A joint measurement was requested for operators that do not commute.
    #[error("non-commuting detection pair: {0}")]
    NonCommuting(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, EosError>;

impl EosError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            EosError::Config(_) | EosError::Domain(_) | EosError::Range(_) => 2,
            EosError::Infeasible(_) => 3,
            _ => 4,
        }
    }
}
