//! Probability distributions over matrix columns/rows and seeded index
//! sampling, including the adaptive (residual-norm) sampling stage used to
//! repair a coarse column or row selection.
//!
//! Sampling is deterministic given the generator state: one uniform draw is
//! consumed per sampled index, indices are drawn by inversion of the CDF,
//! and an index with probability zero is never produced. Row sampling is
//! defined as column sampling of the transpose and shares the exact same
//! draw path, so mirrored inputs with equal seeds yield identical index
//! sequences.

use crate::error::{Error, Result};
use crate::matrix::{orthonormality_defect, project_column_space, Matrix, ToleranceConfig};
use crate::rng::RngState;

/// Which way a distribution (or a sample) indexes a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Columns,
    Rows,
}

/// Probability distribution over `0..len`: nonnegative, sums to one.
#[derive(Debug, Clone)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Normalizes nonnegative weights into a distribution.
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("empty weight vector".into()));
        }
        if let Some(bad) = weights.iter().find(|&&w| !(w.is_finite() && w >= 0.0)) {
            return Err(Error::InvalidInput(format!("invalid weight {bad}")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidInput("weights sum to zero".into()));
        }
        Ok(Distribution { probs: weights.iter().map(|w| w / total).collect() })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Indices drawn from a distribution, in draw order (duplicates possible).
#[derive(Debug, Clone)]
pub struct IndexSample {
    pub indices: Vec<usize>,
}

impl IndexSample {
    /// Distinct indices, ascending.
    pub fn unique_sorted(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Distribution proportional to squared column (or row) Euclidean norms.
///
/// Errors with [`Error::ZeroMatrix`] when every entry is zero, since no
/// norm-based distribution exists then.
pub fn norm_squared_distribution(m: &Matrix, axis: Axis) -> Result<Distribution> {
    let weights = match axis {
        Axis::Columns => m.column_norms_sq(),
        Axis::Rows => m.row_norms_sq(),
    };
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Distribution::new(&weights)
}

/// Distribution proportional to squared residual norms after projecting
/// `a` onto the span of an already-selected submatrix.
///
/// With `Axis::Columns`, `selected` holds already-chosen columns of `a`
/// (same row count) and the residual is `a` minus its projection onto their
/// column space; with `Axis::Rows`, `selected` holds chosen rows (same
/// column count) and the projection is onto their row space. A residual
/// that is numerically zero — Frobenius norm at most `1e-12` times that of
/// `a` — yields [`Error::ZeroResidual`]: the selection already reproduces
/// the matrix and there is nothing left to sample.
pub fn residual_distribution(a: &Matrix, selected: &Matrix, axis: Axis) -> Result<Distribution> {
    let residual = match axis {
        Axis::Columns => {
            let proj = project_column_space(a, selected)?;
            &(*a) - &proj
        }
        Axis::Rows => {
            let proj = crate::matrix::project_row_space(a, selected)?;
            &(*a) - &proj
        }
    };
    if residual.frobenius_norm() <= 1e-12 * a.frobenius_norm() {
        return Err(Error::ZeroResidual);
    }
    norm_squared_distribution(&residual, axis)
}

/// Leverage-score distribution over the rows of a matrix with orthonormal
/// columns: `p_i = |row i|^2 / k`.
pub fn leverage_distribution(q: &Matrix, tol: &ToleranceConfig) -> Result<Distribution> {
    let defect = orthonormality_defect(q);
    if defect > tol.orthogonality {
        return Err(Error::NotOrthonormal { max_deviation: defect });
    }
    Distribution::new(&q.row_norms_sq())
}

/// Draws `count` indices i.i.d. from `dist` by CDF inversion.
///
/// Each draw consumes exactly one uniform variate from `rng`; an index with
/// zero probability is never returned.
pub fn sample_iid(dist: &Distribution, count: usize, rng: &mut RngState) -> IndexSample {
    let probs = dist.probs();
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0_f64;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let mut indices = Vec::with_capacity(count);
    for _ in 0..count {
        let u = rng.uniform_f64();
        let mut idx = cdf.partition_point(|&c| c <= u);
        if idx >= probs.len() {
            // cumulative roundoff left the total a hair under 1.0
            idx = probs.len() - 1;
        }
        while idx > 0 && probs[idx] == 0.0 {
            idx -= 1;
        }
        debug_assert!(probs[idx] > 0.0, "sampled a zero-probability index");
        indices.push(idx);
    }
    IndexSample { indices }
}

/// Adaptive column sampling: draws `count` column indices of `a` with
/// probability proportional to squared residual column norms after
/// projecting out the span of `selected`.
pub fn adaptive_sample_columns(
    a: &Matrix,
    selected: &Matrix,
    count: usize,
    rng: &mut RngState,
) -> Result<IndexSample> {
    let dist = residual_distribution(a, selected, Axis::Columns)?;
    Ok(sample_iid(&dist, count, rng))
}

/// Adaptive row sampling, defined as [`adaptive_sample_columns`] on the
/// transposed problem so both orientations share one draw path.
pub fn adaptive_sample_rows(
    a: &Matrix,
    selected: &Matrix,
    count: usize,
    rng: &mut RngState,
) -> Result<IndexSample> {
    adaptive_sample_columns(&a.transpose(), &selected.transpose(), count, rng)
}
