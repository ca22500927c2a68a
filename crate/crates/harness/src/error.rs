//! Harness error type with process exit codes.
//!
//! The binary maps every failure to one of three exit codes so scripts can
//! distinguish caller mistakes from bad input files from numerical trouble:
//!
//! * `2` — usage errors: bad flags, invalid parameter combinations,
//!   configurations that cannot be run at all.
//! * `3` — input/output errors: unreadable files, malformed matrix or
//!   config files, dimension errors in the data itself.
//! * `4` — numerical failures at run time (non-convergence, degenerate
//!   inputs discovered mid-computation).

use thiserror::Error;

/// Result alias for harness operations.
pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// The request itself is invalid (exit code 2).
    #[error("{0}")]
    Usage(String),

    /// A file could not be read, written, or parsed (exit code 3).
    #[error("{0}")]
    Input(String),

    /// The computation failed numerically (exit code 4).
    #[error("{0}")]
    Numerical(String),
}

impl HarnessError {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) => 2,
            HarnessError::Input(_) => 3,
            HarnessError::Numerical(_) => 4,
        }
    }
}

impl From<fastcur::Error> for HarnessError {
    fn from(err: fastcur::Error) -> Self {
        use fastcur::Error as E;
        match err {
            // The caller asked for something the input can never satisfy.
            E::InvalidRank { .. }
            | E::InvalidEpsilon { .. }
            | E::InsufficientSize { .. }
            | E::InvalidInput(_) => HarnessError::Usage(err.to_string()),
            // The data on disk is malformed or inconsistent.
            E::Parse(_) | E::DimensionMismatch(_) => HarnessError::Input(err.to_string()),
            // Everything else is a numerical failure during the run.
            E::ConvergenceFailure
            | E::ZeroMatrix
            | E::ZeroResidual
            | E::NotOrthonormal { .. }
            | E::SingularShift { .. }
            | E::NoFeasibleIndex { .. }
            | E::DegenerateDenominator => HarnessError::Numerical(err.to_string()),
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(err: std::io::Error) -> Self {
        HarnessError::Input(err.to_string())
    }
}
