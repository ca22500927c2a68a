//! Randomized CUR matrix decomposition.
//!
//! A CUR decomposition approximates a matrix `A` by `C * U * R`, where `C`
//! is a small set of actual columns of `A` and `R` a small set of actual
//! rows — an interpretable alternative to the SVD whose factors live in the
//! coordinate system of the data.
//!
//! The crate's centerpiece is [`fast_cur`]: a relative-error CUR pipeline
//! that selects near-optimal columns by deterministic dual-set
//! sparsification of a randomized sketch, tops the selection up by adaptive
//! residual sampling, selects rows by the mirrored construction, and never
//! solves a spectral problem of full size. A leverage-score baseline
//! ([`subspace_sampling_cur`]) — which does pay for a full SVD — is
//! included for comparison, along with the building blocks: the sketch
//! ([`randomized_svd`]), the sparsifier ([`dual_set_sparsify`]), and the
//! sampling primitives.
//!
//! All randomness flows through [`RngState`], a small counter-based
//! generator wrapper: equal seeds give bitwise-equal decompositions on any
//! platform.
//!
//! ```
//! use fastcur::{fast_cur, relative_error_ratio, Matrix, RngState};
//!
//! // A noisy low-rank matrix...
//! let mut rng = RngState::new(7);
//! let base = rng.gaussian_matrix(80, 60);
//! let a = base.best_rank_k(5).unwrap();
//! let noise = rng.gaussian_matrix(80, 60).scale(0.01);
//! let a = &a + &noise;
//!
//! // ...decomposed from 18 columns and 48 rows of itself.
//! let d = fast_cur(&a, 3, 1.0, &mut RngState::new(42)).unwrap();
//! let ratio = relative_error_ratio(&a, &d, 3).unwrap();
//! assert!(ratio.is_finite());
//! ```

mod cur;
pub mod diagnostics;
mod dualset;
mod error;
mod matrix;
mod rng;
mod sampling;
mod sketch;

pub use cur::{
    fast_cur, fast_cur_with_params, fast_row_select, near_optimal_columns, rank_k_tail,
    reconstruction_error, relative_error_ratio, relative_error_ratio_from_tail,
    subspace_sampling_cur, subspace_sampling_cur_with_svd, ColumnSelection, CurDecomposition,
    CurParams, DecompositionKind, RowSelection,
};
pub use dualset::{
    dual_set_sparsify, dual_set_sparsify_traced, potential_phi, write_trace, DualSetInput,
    TraceRecord, WeightVector,
};
pub use error::{Error, Result};
pub use matrix::{
    best_rank_k_in_column_space, orthonormal_basis, project_column_space, project_row_space,
    Matrix, SvdFactors, ToleranceConfig,
};
pub use rng::{mix_seed, splitmix64, RngState};
pub use sampling::{
    adaptive_sample_columns, adaptive_sample_rows, leverage_distribution,
    norm_squared_distribution, residual_distribution, sample_iid, Axis, Distribution, IndexSample,
};
pub use sketch::{randomized_svd, randomized_svd_powered, sketch_width, ApproxSvd};
