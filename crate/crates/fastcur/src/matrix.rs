//! Dense real matrices and the deterministic linear algebra every other
//! module builds on: exact SVD, truncated SVD, pseudoinverse, and orthogonal
//! projections onto column/row spaces.
//!
//! The [`Matrix`] type wraps a dense `f64` matrix with two invariants: all
//! entries are finite, and (for publicly constructed matrices) both
//! dimensions are at least 1. Rank-truncating operations may legitimately
//! produce factors with zero columns (a numerically zero input has rank 0);
//! such matrices arise only as outputs.
//!
//! Projections are computed through an orthonormal basis of the relevant
//! subspace (never by forming `X·X†` explicitly), and every singular value
//! decomposition in the crate funnels through one internal engine so that
//! diagnostics can observe the largest problem ever factorized.

use nalgebra::DMatrix;

use crate::diagnostics;
use crate::error::{Error, Result};

/// Iteration budget for the SVD engine; exceeded means [`Error::ConvergenceFailure`].
const SVD_MAX_SWEEPS: usize = 1_000_000;

/// Sweep budget for the column-orthogonalization repair pass; it is
/// warm-started so a handful of sweeps suffices, but exceeding the budget
/// means [`Error::ConvergenceFailure`].
const POLISH_MAX_SWEEPS: usize = 64;

/// Numerical tolerances shared by rank decisions and validity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Relative cutoff for rank decisions: singular values at or below
    /// `rank_cutoff * sigma_max` are treated as zero.
    pub rank_cutoff: f64,
    /// Max allowed deviation of `QᵀQ` from the identity for a matrix that
    /// claims orthonormal columns.
    pub orthogonality: f64,
    /// Relative reconstruction error budget for factorization outputs.
    pub reconstruction: f64,
}

impl ToleranceConfig {
    /// Validated constructor; each tolerance must lie strictly in (0, 1).
    pub fn new(rank_cutoff: f64, orthogonality: f64, reconstruction: f64) -> Result<Self> {
        for (name, v) in [
            ("rank_cutoff", rank_cutoff),
            ("orthogonality", orthogonality),
            ("reconstruction", reconstruction),
        ] {
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                return Err(Error::InvalidInput(format!(
                    "tolerance {name} = {v} must lie strictly in (0, 1)"
                )));
            }
        }
        Ok(ToleranceConfig { rank_cutoff, orthogonality, reconstruction })
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            rank_cutoff: 1e-12,
            orthogonality: 1e-10,
            reconstruction: 1e-8,
        }
    }
}

/// Dense real matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    inner: DMatrix<f64>,
}

impl Matrix {
    /// Builds a matrix from entries listed row by row.
    ///
    /// Errors: [`Error::InvalidInput`] for zero dimensions or non-finite
    /// entries, [`Error::DimensionMismatch`] when `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite entry {bad}")));
        }
        Ok(Matrix { inner: DMatrix::from_row_slice(rows, cols, data) })
    }

    /// Builds a matrix entry by entry. Panics if `f` returns a non-finite
    /// value or a dimension is zero; use [`Matrix::from_row_major`] for
    /// untrusted data.
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let inner = DMatrix::from_fn(rows, cols, |i, j| {
            let v = f(i, j);
            assert!(v.is_finite(), "non-finite entry at ({i}, {j})");
            v
        });
        Matrix { inner }
    }

    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix { inner: DMatrix::zeros(rows, cols) }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity order must be positive");
        Matrix { inner: DMatrix::identity(n, n) }
    }

    pub(crate) fn from_inner(inner: DMatrix<f64>) -> Self {
        debug_assert!(inner.iter().all(|v| v.is_finite()), "non-finite entry");
        Matrix { inner }
    }

    pub(crate) fn inner(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn nrows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.inner.nrows(), self.inner.ncols())
    }

    /// Entry at `(row, col)`. Panics when out of range.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.inner[(row, col)]
    }

    /// Entries listed row by row.
    pub fn to_row_major(&self) -> Vec<f64> {
        let (m, n) = self.shape();
        let mut out = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix { inner: self.inner.transpose() }
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        assert!(factor.is_finite(), "scale factor must be finite");
        Matrix { inner: &self.inner * factor }
    }

    /// Frobenius norm (square root of the sum of squared entries).
    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    /// Largest absolute entry (0 for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Squared Euclidean norm of each column.
    pub fn column_norms_sq(&self) -> Vec<f64> {
        (0..self.ncols()).map(|j| self.inner.column(j).norm_squared()).collect()
    }

    /// Squared Euclidean norm of each row.
    pub fn row_norms_sq(&self) -> Vec<f64> {
        (0..self.nrows()).map(|i| self.inner.row(i).norm_squared()).collect()
    }

    /// Copies the listed columns (duplicates allowed, order preserved).
    pub fn select_columns(&self, indices: &[usize]) -> Result<Matrix> {
        if indices.is_empty() {
            return Err(Error::InvalidInput("empty column selection".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&j| j >= self.ncols()) {
            return Err(Error::InvalidInput(format!(
                "column index {bad} out of range for {} columns",
                self.ncols()
            )));
        }
        let inner = DMatrix::from_fn(self.nrows(), indices.len(), |i, j| {
            self.inner[(i, indices[j])]
        });
        Ok(Matrix { inner })
    }

    /// Copies the listed rows (duplicates allowed, order preserved).
    pub fn select_rows(&self, indices: &[usize]) -> Result<Matrix> {
        if indices.is_empty() {
            return Err(Error::InvalidInput("empty row selection".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.nrows()) {
            return Err(Error::InvalidInput(format!(
                "row index {bad} out of range for {} rows",
                self.nrows()
            )));
        }
        let inner = DMatrix::from_fn(indices.len(), self.ncols(), |i, j| {
            self.inner[(indices[i], j)]
        });
        Ok(Matrix { inner })
    }

    /// Concatenates blocks left to right. All blocks must share a row count.
    pub fn hstack(blocks: &[&Matrix]) -> Result<Matrix> {
        let first = blocks.first().ok_or_else(|| {
            Error::InvalidInput("hstack needs at least one block".into())
        })?;
        let m = first.nrows();
        if blocks.iter().any(|b| b.nrows() != m) {
            return Err(Error::DimensionMismatch("hstack blocks differ in row count".into()));
        }
        let total: usize = blocks.iter().map(|b| b.ncols()).sum();
        let mut inner = DMatrix::zeros(m, total);
        let mut at = 0;
        for b in blocks {
            inner.view_mut((0, at), (m, b.ncols())).copy_from(&b.inner);
            at += b.ncols();
        }
        Ok(Matrix { inner })
    }

    /// Concatenates blocks top to bottom. All blocks must share a column count.
    pub fn vstack(blocks: &[&Matrix]) -> Result<Matrix> {
        let first = blocks.first().ok_or_else(|| {
            Error::InvalidInput("vstack needs at least one block".into())
        })?;
        let n = first.ncols();
        if blocks.iter().any(|b| b.ncols() != n) {
            return Err(Error::DimensionMismatch("vstack blocks differ in column count".into()));
        }
        let total: usize = blocks.iter().map(|b| b.nrows()).sum();
        let mut inner = DMatrix::zeros(total, n);
        let mut at = 0;
        for b in blocks {
            inner.view_mut((at, 0), (b.nrows(), n)).copy_from(&b.inner);
            at += b.nrows();
        }
        Ok(Matrix { inner })
    }

    /// Exact singular value decomposition with rank-revealing truncation.
    ///
    /// Singular values at or below `tol.rank_cutoff * sigma_max` are dropped
    /// together with their singular vectors, so the returned factors have
    /// exactly `rank` columns and every retained value is strictly positive.
    /// A numerically zero matrix yields empty factors (rank 0).
    pub fn exact_svd(&self, tol: &ToleranceConfig) -> Result<SvdFactors> {
        diagnostics::record_exact_svd();
        let (u, sigma, v) = svd_engine(&self.inner)?;
        let rank = numerical_rank(&sigma, tol.rank_cutoff);
        Ok(SvdFactors {
            u: Matrix { inner: u.columns(0, rank).into_owned() },
            sigma: sigma[..rank].to_vec(),
            v: Matrix { inner: v.columns(0, rank).into_owned() },
        })
    }

    /// Best rank-`k` approximation in the Frobenius norm (truncated SVD),
    /// returned as a dense matrix of the original shape.
    pub fn best_rank_k(&self, k: usize) -> Result<Matrix> {
        let maxk = self.nrows().min(self.ncols());
        if k == 0 || k > maxk {
            return Err(Error::InvalidRank {
                k,
                reason: format!("must lie in 1..={maxk} for a {}x{} matrix", self.nrows(), self.ncols()),
            });
        }
        let (u, sigma, v) = svd_engine(&self.inner)?;
        let keep = k.min(sigma.len());
        let uk = u.columns(0, keep);
        let vk = v.columns(0, keep);
        let mut scaled = uk.into_owned();
        for j in 0..keep {
            scaled.column_mut(j).scale_mut(sigma[j]);
        }
        Ok(Matrix { inner: &scaled * vk.transpose() })
    }

    /// Moore–Penrose pseudoinverse via the SVD, with the same rank cutoff as
    /// [`Matrix::exact_svd`]. The pseudoinverse of a numerically zero matrix
    /// is the zero matrix of transposed shape.
    pub fn pseudoinverse(&self, tol: &ToleranceConfig) -> Result<Matrix> {
        let (u, sigma, v) = svd_engine(&self.inner)?;
        let rank = numerical_rank(&sigma, tol.rank_cutoff);
        if rank == 0 {
            return Ok(Matrix::zeros(self.ncols(), self.nrows()));
        }
        // A† = V Σ⁻¹ Uᵀ
        let mut vs = v.columns(0, rank).into_owned();
        for j in 0..rank {
            vs.column_mut(j).scale_mut(1.0 / sigma[j]);
        }
        Ok(Matrix { inner: &vs * u.columns(0, rank).transpose() })
    }
}

impl std::ops::Mul for &Matrix {
    type Output = Matrix;

    /// Matrix product. Panics on inner-dimension mismatch (like the
    /// underlying algebra); shapes are the caller's structural invariant.
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.ncols(),
            rhs.nrows(),
            "product shape mismatch: {:?} * {:?}",
            self.shape(),
            rhs.shape()
        );
        Matrix { inner: &self.inner * &rhs.inner }
    }
}

impl std::ops::Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "sum shape mismatch");
        Matrix { inner: &self.inner + &rhs.inner }
    }
}

impl std::ops::Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "difference shape mismatch");
        Matrix { inner: &self.inner - &rhs.inner }
    }
}

/// Rank-revealing SVD output: `u * diag(sigma) * vᵀ` reconstructs the input.
///
/// `sigma` is strictly positive and nonincreasing; `u` and `v` have
/// orthonormal columns, one per retained singular value.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl SvdFactors {
    /// Number of retained singular values.
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// Dense `u * diag(sigma) * vᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        if self.rank() == 0 {
            return Matrix::zeros(self.u.nrows().max(1), self.v.nrows().max(1));
        }
        let mut us = self.u.inner.clone();
        for j in 0..self.rank() {
            us.column_mut(j).scale_mut(self.sigma[j]);
        }
        Matrix { inner: &us * self.v.inner.transpose() }
    }
}

/// Orthogonal projection of every column of `a` onto the column space of `x`.
///
/// Computed as `Q (Qᵀ a)` where `Q` is an orthonormal basis of range(`x`)
/// (rank-truncated, so a rank-deficient `x` projects onto its true range).
pub fn project_column_space(a: &Matrix, x: &Matrix) -> Result<Matrix> {
    if a.nrows() != x.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "projection target has {} rows, subspace matrix has {}",
            a.nrows(),
            x.nrows()
        )));
    }
    let q = orthonormal_basis_opt(x)?;
    match q {
        None => Ok(Matrix::zeros(a.nrows(), a.ncols())),
        Some(q) => {
            let coeff = q.inner.transpose() * &a.inner;
            Ok(Matrix { inner: &q.inner * coeff })
        }
    }
}

/// Orthogonal projection of every row of `a` onto the row space of `y`:
/// the transpose-dual of [`project_column_space`].
pub fn project_row_space(a: &Matrix, y: &Matrix) -> Result<Matrix> {
    if a.ncols() != y.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "projection target has {} columns, subspace matrix has {}",
            a.ncols(),
            y.ncols()
        )));
    }
    let q = orthonormal_basis_opt(&y.transpose())?;
    match q {
        None => Ok(Matrix::zeros(a.nrows(), a.ncols())),
        Some(q) => {
            let coeff = &a.inner * &q.inner;
            Ok(Matrix { inner: coeff * q.inner.transpose() })
        }
    }
}

/// Best rank-`k` approximation of `a` whose columns are constrained to the
/// column space of `x`: project onto range(`x`), then truncate to rank `k`
/// inside that subspace.
pub fn best_rank_k_in_column_space(a: &Matrix, x: &Matrix, k: usize) -> Result<Matrix> {
    if a.nrows() != x.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "target has {} rows, subspace matrix has {}",
            a.nrows(),
            x.nrows()
        )));
    }
    if k == 0 {
        return Err(Error::InvalidRank { k, reason: "must be at least 1".into() });
    }
    let q = match orthonormal_basis_opt(x)? {
        None => return Ok(Matrix::zeros(a.nrows(), a.ncols())),
        Some(q) => q,
    };
    let b = Matrix { inner: q.inner.transpose() * &a.inner };
    let keep = k.min(b.nrows()).min(b.ncols());
    let bk = b.best_rank_k(keep)?;
    Ok(Matrix { inner: &q.inner * &bk.inner })
}

/// Orthonormal basis of range(`x`) via the rank-truncated SVD: a matrix
/// with orthonormal columns spanning exactly the column space of `x`.
/// A numerically zero `x` has the trivial range and yields
/// [`Error::ZeroMatrix`].
pub fn orthonormal_basis(x: &Matrix) -> Result<Matrix> {
    orthonormal_basis_opt(x)?.ok_or(Error::ZeroMatrix)
}

/// [`orthonormal_basis`] with the rank-0 case as `None`, for callers that
/// treat the trivial subspace as a legitimate projection target.
pub(crate) fn orthonormal_basis_opt(x: &Matrix) -> Result<Option<Matrix>> {
    let (u, sigma, _) = svd_engine(&x.inner)?;
    let rank = numerical_rank(&sigma, ToleranceConfig::default().rank_cutoff);
    if rank == 0 {
        return Ok(None);
    }
    Ok(Some(Matrix { inner: u.columns(0, rank).into_owned() }))
}

fn numerical_rank(sigma: &[f64], rank_cutoff: f64) -> usize {
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    if sigma_max <= 0.0 {
        return 0;
    }
    sigma.iter().take_while(|&&s| s > rank_cutoff * sigma_max).count()
}

/// The one SVD implementation in the crate: thin factors, singular values
/// sorted nonincreasing. Every caller (exact SVD, pseudoinverse, bases,
/// sketches) routes through here, which is also where the diagnostics probe
/// observes problem shapes.
///
/// Every factorization is audited against the input: the bidiagonal-QR
/// backend occasionally returns factors that fail to reproduce the matrix to
/// working precision (clustered singular values are a known trigger), and
/// when that happens the factors are repaired by a warm-started one-sided
/// Jacobi orthogonalization, which is unconditionally accurate.
pub(crate) fn svd_engine(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    diagnostics::record_svd_shape(m.nrows(), m.ncols());
    if m.nrows() < m.ncols() {
        // Work on the transpose so the right factor below is square: then
        // span(V) is the whole row space and the repair path loses nothing.
        let (u, sigma, v) = svd_tall(&m.transpose())?;
        return Ok((v, sigma, u));
    }
    svd_tall(m)
}

/// Audited SVD of a tall-or-square matrix (rows >= cols).
fn svd_tall(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    let svd = m
        .clone()
        .try_svd(true, true, f64::EPSILON, SVD_MAX_SWEEPS)
        .ok_or(Error::ConvergenceFailure)?;
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let (u, sigma, v) = sort_factors(u, sigma, v_t.transpose());

    let tolerance = factor_audit_tolerance(m, &sigma);
    if factorization_residual(m, &u, &sigma, &v) <= tolerance {
        return Ok((u, sigma, v));
    }
    // The right factor is square here, so A·V·Vᵀ = A up to roundoff and an
    // accurate left factor can be re-derived from the columns of A·V.
    let (u, sigma, v) = orthogonalize_columns(m, &v)?;
    if factorization_residual(m, &u, &sigma, &v) > 100.0 * tolerance {
        return Err(Error::ConvergenceFailure);
    }
    Ok((u, sigma, v))
}

/// Order factor columns by nonincreasing singular value. The backend sorts,
/// but the ordering is a contract here: enforce it.
fn sort_factors(
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    v: DMatrix<f64>,
) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let sorted = sigma.windows(2).all(|w| w[0] >= w[1]);
    if sorted {
        return (u, sigma, v);
    }
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).expect("finite singular values"));
    let sigma_sorted: Vec<f64> = order.iter().map(|&i| sigma[i]).collect();
    let u_sorted = DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, order[j])]);
    let v_sorted = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, order[j])]);
    (u_sorted, sigma_sorted, v_sorted)
}

/// Largest max-abs factorization residual accepted without repair: a modest
/// multiple of machine epsilon, scaled by problem size and the dominant
/// singular value.
fn factor_audit_tolerance(m: &DMatrix<f64>, sigma: &[f64]) -> f64 {
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    8.0 * f64::EPSILON * (m.nrows() + m.ncols()) as f64 * sigma_max
}

/// Max-abs entry of `M - U diag(sigma) Vᵀ`.
fn factorization_residual(
    m: &DMatrix<f64>,
    u: &DMatrix<f64>,
    sigma: &[f64],
    v: &DMatrix<f64>,
) -> f64 {
    let mut scaled = u.clone();
    for (j, &s) in sigma.iter().enumerate() {
        scaled.column_mut(j).scale_mut(s);
    }
    let resid = m - &scaled * v.transpose();
    resid.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Re-derive an SVD of `a` (rows >= cols) from a square orthonormal right
/// factor `v0`: rotate the columns of `a * v0` until they are mutually
/// orthogonal (cyclic one-sided Jacobi), accumulating the rotations into the
/// right factor, then read singular values off as column norms. The rotations
/// leave the product `W Vᵀ` invariant, so the result reproduces `a` to
/// roundoff regardless of how inaccurate `v0`'s column directions were.
fn orthogonalize_columns(
    a: &DMatrix<f64>,
    v0: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    let n = a.ncols();
    let mut w = a * v0;
    let mut v = v0.clone();
    // Columns below the roundoff floor of the whole matrix carry no usable
    // direction: rotations against the dominant columns re-pollute them at
    // their own scale every sweep, so insisting on orthogonalizing them
    // would cycle forever. They are truncated by the rank cutoff downstream.
    let negligible = f64::EPSILON * w.norm();
    let mut converged = false;
    for _ in 0..POLISH_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let wp = w.column(p);
                let wq = w.column(q);
                let app = wp.dot(&wp);
                let aqq = wq.dot(&wq);
                let apq = wp.dot(&wq);
                if app.sqrt() <= negligible || aqq.sqrt() <= negligible {
                    continue;
                }
                if apq.abs() <= f64::EPSILON * app.sqrt() * aqq.sqrt() {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_column_pair(&mut w, p, q, c, s);
                rotate_column_pair(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure);
    }
    let sigma: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut u = w;
    for (j, &s) in sigma.iter().enumerate() {
        if s > 0.0 {
            u.column_mut(j).scale_mut(1.0 / s);
        }
    }
    Ok(sort_factors(u, sigma, v))
}

/// Apply the Givens rotation `[c -s; s c]` to columns `p` and `q`.
fn rotate_column_pair(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let mp = m[(i, p)];
        let mq = m[(i, q)];
        m[(i, p)] = c * mp - s * mq;
        m[(i, q)] = s * mp + c * mq;
    }
}

/// Singular values only (sorted nonincreasing), for norm-tail computations
/// where the vectors are not needed.
pub(crate) fn singular_values(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    diagnostics::record_svd_shape(m.nrows(), m.ncols());
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, SVD_MAX_SWEEPS)
        .ok_or(Error::ConvergenceFailure)?;
    let mut sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    sigma.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    Ok(sigma)
}

/// Max-abs deviation of `QᵀQ` from the identity; the orthonormality measure
/// used by validity checks.
pub(crate) fn orthonormality_defect(q: &Matrix) -> f64 {
    let gram = q.inner.transpose() * &q.inner;
    let n = gram.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}
