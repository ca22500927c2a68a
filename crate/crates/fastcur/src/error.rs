//! Error type shared by every operation in this crate.
//!
//! All fallible operations return [`Result`]. Numerical routines surface
//! failures as values instead of panicking; panics are reserved for internal
//! invariant violations (bugs).

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Operand shapes are incompatible for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A rank argument is outside its valid range for the given matrix.
    #[error("invalid rank {k}: {reason}")]
    InvalidRank { k: usize, reason: String },

    /// An accuracy parameter lies outside its valid interval.
    #[error("invalid epsilon {value}: must lie in {range}")]
    InvalidEpsilon { value: f64, range: &'static str },

    /// The SVD iteration did not converge within its iteration budget.
    #[error("singular value decomposition failed to converge")]
    ConvergenceFailure,

    /// The input matrix is identically zero where a nonzero matrix is required.
    #[error("matrix has zero Frobenius norm")]
    ZeroMatrix,

    /// A residual is numerically zero relative to the input, so the requested
    /// residual-driven distribution does not exist.
    #[error("residual is numerically zero relative to the input")]
    ZeroResidual,

    /// A matrix that must have orthonormal columns does not, within tolerance.
    #[error("columns are not orthonormal (max deviation {max_deviation:.3e})")]
    NotOrthonormal { max_deviation: f64 },

    /// The barrier shift is not strictly below every eigenvalue, so the
    /// potential function is undefined.
    #[error("potential shift {shift} is not strictly below every eigenvalue")]
    SingularShift { shift: f64 },

    /// No candidate index satisfies the dual-set weight inequality. Indicates
    /// invalid input (the existence argument guarantees one otherwise).
    #[error("no feasible index at sparsification iteration {iteration}")]
    NoFeasibleIndex { iteration: usize },

    /// The matrix is too small for the requested column/row budgets.
    #[error(
        "matrix is {rows}x{cols} but the decomposition needs {needed_cols} columns and {needed_rows} rows"
    )]
    InsufficientSize {
        rows: usize,
        cols: usize,
        needed_rows: usize,
        needed_cols: usize,
    },

    /// The error-ratio denominator is numerically zero (the input is already
    /// rank ≤ k), so the ratio is undefined.
    #[error("rank-k tail of the input is numerically zero; error ratio undefined")]
    DegenerateDenominator,

    /// A constructor argument violates a documented invariant.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A serialized decomposition could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}
