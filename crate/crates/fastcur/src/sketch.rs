//! Randomized approximate truncated SVD.
//!
//! Compresses an `m x n` matrix through a Gaussian sketch: draw a random
//! test matrix, capture the dominant column space of `A` from `A * Omega`,
//! and read the leading right singular directions off the much smaller
//! projected matrix. The output is the pair `(B, Z)` with `Z` orthonormal
//! and `B = A * Z`, so `B * Zᵀ` is a rank-`k` approximation of `A` whose
//! expected squared error is within a `(1 + eps0)` factor of the best
//! rank-`k` error.
//!
//! Cost is dominated by two products with `A` and one SVD of an
//! `O(k/eps0) x n` matrix — no full-size spectral problem is ever solved,
//! which [`crate::diagnostics`] can confirm.

use crate::error::{Error, Result};
use crate::matrix::{svd_engine, Matrix};
use crate::rng::RngState;

/// Rank-`k` sketch factors: `b * zᵀ` approximates the original matrix.
#[derive(Debug, Clone)]
pub struct ApproxSvd {
    /// `m x k` coefficient matrix, equal to `A * z`.
    pub b: Matrix,
    /// `n x k` matrix with orthonormal columns spanning the captured row space.
    pub z: Matrix,
    /// Target rank of the sketch.
    pub k: usize,
}

impl ApproxSvd {
    /// Residual `A - B Zᵀ` against the matrix this sketch was built from.
    pub fn residual(&self, a: &Matrix) -> Result<Matrix> {
        if a.nrows() != self.b.nrows() || a.ncols() != self.z.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "sketch was built from a {}x{} matrix, got {}x{}",
                self.b.nrows(),
                self.z.nrows(),
                a.nrows(),
                a.ncols()
            )));
        }
        let approx = &self.b * &self.z.transpose();
        Ok(&(*a) - &approx)
    }
}

/// Number of Gaussian test vectors used for a rank-`k` sketch at accuracy
/// `eps0`, capped by the matrix dimensions.
pub fn sketch_width(m: usize, n: usize, k: usize, eps0: f64) -> usize {
    let extra = (k as f64 / eps0).ceil() as usize;
    (k + extra).min(m).min(n)
}

/// Randomized approximate truncated SVD of `a` at rank `k`.
///
/// Requirements: `1 <= k < min(m, n)` and `eps0` strictly inside `(0, 1)`.
/// The returned `z` has orthonormal columns and `b = a * z` exactly, so the
/// residual `a - b zᵀ` is the projection error onto the captured row space
/// and `(a - b zᵀ) z = 0` identically.
///
/// Draws from `rng` in a fixed order (the test matrix is filled row by
/// row), so equal seeds give bitwise-equal factors.
pub fn randomized_svd(a: &Matrix, k: usize, eps0: f64, rng: &mut RngState) -> Result<ApproxSvd> {
    randomized_svd_powered(a, k, eps0, 0, rng)
}

/// [`randomized_svd`] with `power_iters` rounds of subspace iteration.
///
/// Each round multiplies the sketch by `A Aᵀ` (with re-orthonormalization
/// for stability), sharpening the captured subspace when the spectrum
/// decays slowly. Zero rounds reproduces [`randomized_svd`] exactly.
pub fn randomized_svd_powered(
    a: &Matrix,
    k: usize,
    eps0: f64,
    power_iters: usize,
    rng: &mut RngState,
) -> Result<ApproxSvd> {
    let (m, n) = a.shape();
    let max_rank = m.min(n);
    if k == 0 || k >= max_rank {
        return Err(Error::InvalidRank {
            k,
            reason: format!("sketch rank must lie in 1..{max_rank} for a {m}x{n} matrix"),
        });
    }
    if !(eps0.is_finite() && eps0 > 0.0 && eps0 < 1.0) {
        return Err(Error::InvalidEpsilon { value: eps0, range: "(0, 1)" });
    }

    let width = sketch_width(m, n, k, eps0);
    let omega = rng.gaussian_matrix(n, width);
    let mut y = a.inner() * omega.inner();

    for _ in 0..power_iters {
        let q = y.qr().q();
        let at_q = a.inner().transpose() * q;
        let q2 = at_q.qr().q();
        y = a.inner() * q2;
    }

    // Thin QR without rank truncation: even when the sketch is rank
    // deficient the basis keeps `width >= k + 1` orthonormal columns, so the
    // projected matrix always owns at least k singular triplets.
    let q = y.qr().q();
    let projected = q.transpose() * a.inner();
    let (_, _, v) = svd_engine(&projected)?;
    debug_assert!(v.ncols() >= k, "projected matrix lost singular directions");

    let z = Matrix::from_inner(v.columns(0, k).into_owned());
    let b = Matrix::from_inner(a.inner() * z.inner());
    Ok(ApproxSvd { b, z, k })
}
