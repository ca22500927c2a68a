//! CUR decomposition: `A ~ C * U * R` where `C` holds actual columns of `A`
//! and `R` actual rows.
//!
//! Two constructions are provided.
//!
//! The fast pipeline ([`fast_cur`]) never factorizes the full matrix. A
//! single randomized sketch is shared by both selection stages: columns are
//! chosen by deterministic dual-set sparsification of the sketch residual
//! (then topped up by adaptive residual sampling), and rows are chosen the
//! same way using an orthonormal basis of the sketch's coefficient matrix.
//! The middle factor is `U = C† A R†`.
//!
//! The baseline ([`subspace_sampling_cur`]) samples columns by exact
//! leverage scores of the top right singular subspace — which requires a
//! full SVD, the very cost the fast pipeline avoids — then rows by leverage
//! scores of the selected columns' basis, with a rescaled pseudoinverse as
//! the middle factor.

use serde::{Deserialize, Serialize};

use crate::dualset::{dual_set_sparsify, DualSetInput};
use crate::error::{Error, Result};
use crate::matrix::{orthonormal_basis, singular_values, Matrix, ToleranceConfig};
use crate::rng::RngState;
use crate::sampling::{
    adaptive_sample_columns, adaptive_sample_rows, leverage_distribution, sample_iid,
};
use crate::sketch::{randomized_svd, ApproxSvd};

/// Sizing parameters for the fast CUR pipeline.
///
/// `c1`/`r1` are the dual-set (deterministic) column/row budgets, `c2`/`r2`
/// the adaptive (random) top-ups, and `eps0` the sketch accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurParams {
    pub k: usize,
    pub c1: usize,
    pub c2: usize,
    pub r1: usize,
    pub r2: usize,
    pub eps0: f64,
}

impl CurParams {
    /// Default sizing for target rank `k` and accuracy `eps` in `(0, 1]`:
    ///
    /// * `c1 = ceil(4 k / eps^(2/3))`
    /// * `c2 = ceil(2 k / eps)`
    /// * `r1 = ceil(4 k / eps^(2/3))`
    /// * `r2 = ceil(2 (c1 + c2) / eps)`
    /// * `eps0 = min(eps^(2/3), 0.99)`
    ///
    /// The selected-column count scales as `O(k / eps^(2/3))` and the row
    /// count as `O(c / eps)`, matching the guarantee that the expected
    /// squared error is within `(1 + eps)` of the best rank-`k` error.
    pub fn new(k: usize, eps: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidRank { k, reason: "target rank must be at least 1".into() });
        }
        if !(eps.is_finite() && eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidEpsilon { value: eps, range: "(0, 1]" });
        }
        let e23 = eps.powf(2.0 / 3.0);
        let c1 = (4.0 * k as f64 / e23).ceil() as usize;
        let c2 = (2.0 * k as f64 / eps).ceil() as usize;
        let r1 = c1;
        let r2 = (2.0 * (c1 + c2) as f64 / eps).ceil() as usize;
        let eps0 = e23.min(0.99);
        CurParams::with_counts(k, eps0, c1, c2, r1, r2)
    }

    /// Explicit stage budgets. Requires `k >= 1`, `eps0` in `(0, 1)`, and
    /// strict `c1 > k`, `r1 > k` (the dual-set stage needs more vectors
    /// than the dimension it conditions).
    pub fn with_counts(
        k: usize,
        eps0: f64,
        c1: usize,
        c2: usize,
        r1: usize,
        r2: usize,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidRank { k, reason: "target rank must be at least 1".into() });
        }
        if !(eps0.is_finite() && eps0 > 0.0 && eps0 < 1.0) {
            return Err(Error::InvalidEpsilon { value: eps0, range: "(0, 1)" });
        }
        if c1 <= k {
            return Err(Error::InvalidInput(format!(
                "dual-set column budget c1 = {c1} must exceed the target rank k = {k}"
            )));
        }
        if r1 <= k {
            return Err(Error::InvalidInput(format!(
                "dual-set row budget r1 = {r1} must exceed the target rank k = {k}"
            )));
        }
        Ok(CurParams { k, c1, c2, r1, r2, eps0 })
    }

    /// Total column budget `c1 + c2`.
    pub fn total_columns(&self) -> usize {
        self.c1 + self.c2
    }

    /// Total row budget `r1 + r2`.
    pub fn total_rows(&self) -> usize {
        self.r1 + self.r2
    }

    /// Checks the budgets against a concrete `m x n` matrix: the pipeline
    /// needs `k < min(m, n)`, at most `n` columns and at most `m` rows.
    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        if self.k >= m.min(n) {
            return Err(Error::InvalidRank {
                k: self.k,
                reason: format!("must be below min(m, n) = {} for a {m}x{n} matrix", m.min(n)),
            });
        }
        if self.total_columns() > n || self.total_rows() > m {
            return Err(Error::InsufficientSize {
                rows: m,
                cols: n,
                needed_rows: self.total_rows(),
                needed_cols: self.total_columns(),
            });
        }
        Ok(())
    }
}

/// Columns picked by the two-stage selection.
#[derive(Debug, Clone)]
pub struct ColumnSelection {
    /// The selected columns of the source matrix, in `indices` order.
    pub matrix: Matrix,
    /// Distinct source-column indices: dual-set picks first (ascending),
    /// then adaptive picks in draw order.
    pub indices: Vec<usize>,
    /// How many of `indices` came from the dual-set stage.
    pub dual_count: usize,
    /// True when the adaptive stage found a numerically zero residual and
    /// stopped: the dual-set columns already reproduce the matrix.
    pub completed_early: bool,
}

/// Rows picked by the two-stage selection; mirror of [`ColumnSelection`].
#[derive(Debug, Clone)]
pub struct RowSelection {
    pub matrix: Matrix,
    pub indices: Vec<usize>,
    pub dual_count: usize,
    pub completed_early: bool,
}

/// Which construction produced a [`CurDecomposition`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DecompositionKind {
    FastCur(CurParams),
    SubspaceSampling { k: usize, c: usize, r: usize },
}

/// A CUR decomposition: `c` holds columns of the source matrix at
/// `col_indices`, `r` rows at `row_indices`, and `reconstruct()` returns
/// `c * u * r`.
#[derive(Debug, Clone)]
pub struct CurDecomposition {
    pub c: Matrix,
    pub u: Matrix,
    pub r: Matrix,
    pub col_indices: Vec<usize>,
    pub row_indices: Vec<usize>,
    pub kind: DecompositionKind,
}

impl CurDecomposition {
    /// Assembles a decomposition from parts, checking internal consistency:
    /// `u` must be `|cols| x |rows|`, matching the factor shapes.
    pub fn from_parts(
        c: Matrix,
        u: Matrix,
        r: Matrix,
        col_indices: Vec<usize>,
        row_indices: Vec<usize>,
        kind: DecompositionKind,
    ) -> Result<Self> {
        if c.ncols() != col_indices.len() {
            return Err(Error::DimensionMismatch(format!(
                "c has {} columns but {} column indices were given",
                c.ncols(),
                col_indices.len()
            )));
        }
        if r.nrows() != row_indices.len() {
            return Err(Error::DimensionMismatch(format!(
                "r has {} rows but {} row indices were given",
                r.nrows(),
                row_indices.len()
            )));
        }
        if u.shape() != (c.ncols(), r.nrows()) {
            return Err(Error::DimensionMismatch(format!(
                "u must be {}x{}, got {}x{}",
                c.ncols(),
                r.nrows(),
                u.nrows(),
                u.ncols()
            )));
        }
        Ok(CurDecomposition { c, u, r, col_indices, row_indices, kind })
    }

    /// Number of selected columns and rows actually kept.
    pub fn realized_counts(&self) -> (usize, usize) {
        (self.col_indices.len(), self.row_indices.len())
    }

    /// Dense `c * (u * r)`, grouped so the small factors multiply first.
    pub fn reconstruct(&self) -> Matrix {
        let ur = &self.u * &self.r;
        &self.c * &ur
    }
}

// ---------------------------------------------------------------------------
// fast pipeline

/// Near-optimal column selection: dual-set sparsification of the sketch
/// residual, then adaptive residual sampling. Standalone entry point that
/// draws its own sketch; within [`fast_cur`] both stages share one sketch.
pub fn near_optimal_columns(
    a: &Matrix,
    k: usize,
    eps: f64,
    rng: &mut RngState,
) -> Result<ColumnSelection> {
    let params = CurParams::new(k, eps)?;
    let (m, n) = a.shape();
    if params.k >= m.min(n) || params.total_columns() > n {
        return Err(Error::InsufficientSize {
            rows: m,
            cols: n,
            needed_rows: k + 1,
            needed_cols: params.total_columns(),
        });
    }
    if a.frobenius_norm() == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let tol = ToleranceConfig::default();
    let sketch = randomized_svd(a, k, params.eps0, rng)?;
    let residual = sketch.residual(a)?;
    stage_columns(a, &residual, &sketch, params.c1, params.c2, &tol, rng)
}

/// Fast row selection given that good columns are already known to exist:
/// the same dual-set-then-adaptive construction applied to rows, using the
/// sketch's coefficient basis as the isotropic family. Standalone entry
/// point that draws its own sketch.
pub fn fast_row_select(
    a: &Matrix,
    k: usize,
    eps: f64,
    rng: &mut RngState,
) -> Result<RowSelection> {
    let params = CurParams::new(k, eps)?;
    let (m, n) = a.shape();
    if params.k >= m.min(n) || params.total_rows() > m {
        return Err(Error::InsufficientSize {
            rows: m,
            cols: n,
            needed_rows: params.total_rows(),
            needed_cols: k + 1,
        });
    }
    if a.frobenius_norm() == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let tol = ToleranceConfig::default();
    let sketch = randomized_svd(a, k, params.eps0, rng)?;
    let residual = sketch.residual(a)?;
    stage_rows(a, &residual, &sketch, params.r1, params.r2, &tol, rng)
}

fn stage_columns(
    a: &Matrix,
    residual: &Matrix,
    sketch: &ApproxSvd,
    c1: usize,
    c2: usize,
    tol: &ToleranceConfig,
    rng: &mut RngState,
) -> Result<ColumnSelection> {
    // Dual set: arbitrary side = residual columns (norms only), isotropic
    // side = rows of the sketch's orthonormal factor.
    let v1 = sketch.z.transpose();
    let input = DualSetInput::from_column_norms(&residual.column_norms_sq(), &v1, tol)?;
    let weights = dual_set_sparsify(&input, c1)?;
    let mut indices = weights.support();
    let dual_count = indices.len();

    let dual_matrix = a.select_columns(&indices)?;
    let mut completed_early = false;
    if c2 > 0 {
        match adaptive_sample_columns(a, &dual_matrix, c2, rng) {
            Ok(sample) => {
                for &ix in &sample.indices {
                    if !indices.contains(&ix) {
                        indices.push(ix);
                    }
                }
            }
            Err(Error::ZeroResidual) => completed_early = true,
            Err(e) => return Err(e),
        }
    }

    let matrix =
        if indices.len() == dual_count { dual_matrix } else { a.select_columns(&indices)? };
    Ok(ColumnSelection { matrix, indices, dual_count, completed_early })
}

fn stage_rows(
    a: &Matrix,
    residual: &Matrix,
    sketch: &ApproxSvd,
    r1: usize,
    r2: usize,
    tol: &ToleranceConfig,
    rng: &mut RngState,
) -> Result<RowSelection> {
    // Isotropic family over row indices: rows of an orthonormal basis of
    // the sketch coefficients B = A * Z (rank at most k, so r1 > k suffices).
    let basis = orthonormal_basis(&sketch.b)?;
    let v2 = basis.transpose();
    let input = DualSetInput::from_column_norms(&residual.row_norms_sq(), &v2, tol)?;
    let weights = dual_set_sparsify(&input, r1)?;
    let mut indices = weights.support();
    let dual_count = indices.len();

    let dual_matrix = a.select_rows(&indices)?;
    let mut completed_early = false;
    if r2 > 0 {
        match adaptive_sample_rows(a, &dual_matrix, r2, rng) {
            Ok(sample) => {
                for &ix in &sample.indices {
                    if !indices.contains(&ix) {
                        indices.push(ix);
                    }
                }
            }
            Err(Error::ZeroResidual) => completed_early = true,
            Err(e) => return Err(e),
        }
    }

    let matrix = if indices.len() == dual_count { dual_matrix } else { a.select_rows(&indices)? };
    Ok(RowSelection { matrix, indices, dual_count, completed_early })
}

/// Fast CUR decomposition with default budgets for `(k, eps)`;
/// see [`CurParams::new`].
pub fn fast_cur(a: &Matrix, k: usize, eps: f64, rng: &mut RngState) -> Result<CurDecomposition> {
    let params = CurParams::new(k, eps)?;
    fast_cur_with_params(a, &params, rng)
}

/// Fast CUR decomposition with explicit budgets.
///
/// One randomized sketch is drawn and shared by both selection stages; the
/// only spectral problems solved are on sketch-sized matrices and on the
/// selected columns/rows, never on the full matrix. The middle factor is
/// `U = C† A R†`.
pub fn fast_cur_with_params(
    a: &Matrix,
    params: &CurParams,
    rng: &mut RngState,
) -> Result<CurDecomposition> {
    let (m, n) = a.shape();
    params.validate(m, n)?;
    if a.frobenius_norm() == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let tol = ToleranceConfig::default();

    let sketch = randomized_svd(a, params.k, params.eps0, rng)?;
    let residual = sketch.residual(a)?;

    let cols = stage_columns(a, &residual, &sketch, params.c1, params.c2, &tol, rng)?;
    let rows = stage_rows(a, &residual, &sketch, params.r1, params.r2, &tol, rng)?;

    let u = middle_factor(a, &cols.matrix, &rows.matrix, &tol)?;
    CurDecomposition::from_parts(
        cols.matrix,
        u,
        rows.matrix,
        cols.indices,
        rows.indices,
        DecompositionKind::FastCur(params.clone()),
    )
}

/// `U = C† A R†`, associated left-to-right so every product stays thin.
fn middle_factor(a: &Matrix, c: &Matrix, r: &Matrix, tol: &ToleranceConfig) -> Result<Matrix> {
    let c_pinv = c.pseudoinverse(tol)?; // |cols| x m
    let coeff = &c_pinv * a; // |cols| x n
    let r_pinv = r.pseudoinverse(tol)?; // n x |rows|
    Ok(&coeff * &r_pinv)
}

// ---------------------------------------------------------------------------
// subspace-sampling baseline

/// Leverage-score CUR baseline.
///
/// Draws `c` column indices i.i.d. by leverage scores of the top-`k` right
/// singular subspace (computed with a full SVD — the cost this baseline is
/// a baseline for), keeps the distinct ones, then draws `r` row indices by
/// leverage scores of an orthonormal basis of the selected columns. The
/// middle factor is `U = (D W)† D` where `W` is the intersection submatrix
/// and `D` rescales each kept row by `1 / sqrt(r * q_i)` (its sampling
/// probability), the importance-weighting that makes the row-space
/// least-squares fit unbiased.
pub fn subspace_sampling_cur(
    a: &Matrix,
    k: usize,
    c: usize,
    r: usize,
    rng: &mut RngState,
) -> Result<CurDecomposition> {
    let svd = a.exact_svd(&ToleranceConfig::default())?;
    subspace_sampling_cur_with_svd(a, &svd, k, c, r, rng)
}

/// [`subspace_sampling_cur`] with the exact SVD of `a` supplied by the
/// caller, so repeated decompositions of one matrix (benchmark trials) pay
/// for the full factorization once.
pub fn subspace_sampling_cur_with_svd(
    a: &Matrix,
    svd: &crate::matrix::SvdFactors,
    k: usize,
    c: usize,
    r: usize,
    rng: &mut RngState,
) -> Result<CurDecomposition> {
    let (m, n) = a.shape();
    if k == 0 || k > m.min(n) {
        return Err(Error::InvalidRank {
            k,
            reason: format!("must lie in 1..={} for a {m}x{n} matrix", m.min(n)),
        });
    }
    if c == 0 || c > n || r == 0 || r > m {
        return Err(Error::InsufficientSize {
            rows: m,
            cols: n,
            needed_rows: r.max(1),
            needed_cols: c.max(1),
        });
    }
    if a.frobenius_norm() == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    if svd.u.nrows() != m || svd.v.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "supplied factorization is for a {}x{} matrix, got {m}x{n}",
            svd.u.nrows(),
            svd.v.nrows()
        )));
    }
    let tol = ToleranceConfig::default();

    // Column leverage scores from the top right singular subspace (rank may
    // fall short of k on degenerate inputs; use what exists).
    let kk = k.min(svd.rank());
    let vk = Matrix::from_fn(n, kk, |i, j| svd.v.get(i, j));
    let col_dist = leverage_distribution(&vk, &tol)?;
    let col_sample = sample_iid(&col_dist, c, rng);
    let col_indices = dedup_in_draw_order(&col_sample.indices);
    let c_mat = a.select_columns(&col_indices)?;

    // Row leverage scores from the selected columns' orthonormal basis.
    let c_basis = orthonormal_basis(&c_mat)?;
    let row_dist = leverage_distribution(&c_basis, &tol)?;
    let row_sample = sample_iid(&row_dist, r, rng);
    let row_indices = dedup_in_draw_order(&row_sample.indices);
    let r_mat = a.select_rows(&row_indices)?;

    // U = (D W)† D with D_ii = 1 / sqrt(r * q_i) for each kept row.
    let w = c_mat.select_rows(&row_indices)?;
    let d: Vec<f64> =
        row_indices.iter().map(|&i| 1.0 / (r as f64 * row_dist.probs()[i]).sqrt()).collect();
    let dw = Matrix::from_fn(w.nrows(), w.ncols(), |i, j| d[i] * w.get(i, j));
    let dw_pinv = dw.pseudoinverse(&tol)?;
    let u = Matrix::from_fn(dw_pinv.nrows(), dw_pinv.ncols(), |i, j| dw_pinv.get(i, j) * d[j]);

    CurDecomposition::from_parts(
        c_mat,
        u,
        r_mat,
        col_indices,
        row_indices,
        DecompositionKind::SubspaceSampling { k, c, r },
    )
}

fn dedup_in_draw_order(draws: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    for &ix in draws {
        if !out.contains(&ix) {
            out.push(ix);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// error metrics

/// Frobenius reconstruction error `|A - C U R|_F`.
pub fn reconstruction_error(a: &Matrix, decomp: &CurDecomposition) -> Result<f64> {
    let recon = decomp.reconstruct();
    if recon.shape() != a.shape() {
        return Err(Error::DimensionMismatch(format!(
            "decomposition reconstructs {}x{}, matrix is {}x{}",
            recon.nrows(),
            recon.ncols(),
            a.nrows(),
            a.ncols()
        )));
    }
    Ok((&(*a) - &recon).frobenius_norm())
}

/// Frobenius norm of the best-rank-`k` residual, `sqrt(sum_{i>k} sigma_i^2)`,
/// computed from singular values only.
pub fn rank_k_tail(a: &Matrix, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidRank { k, reason: "tail rank must be at least 1".into() });
    }
    let sigma = singular_values(a.inner())?;
    if k >= sigma.len() {
        return Ok(0.0);
    }
    Ok(sigma[k..].iter().map(|s| s * s).sum::<f64>().sqrt())
}

/// `err / tail` with a guard: a tail at or below `1e-12 * |A|_F` means the
/// matrix is numerically rank-`k` and the ratio is undefined
/// ([`Error::DegenerateDenominator`]).
pub fn relative_error_ratio_from_tail(err: f64, tail: f64, a_norm: f64) -> Result<f64> {
    if tail <= 1e-12 * a_norm {
        return Err(Error::DegenerateDenominator);
    }
    Ok(err / tail)
}

/// Reconstruction error of the decomposition relative to the best possible
/// rank-`k` error: `|A - C U R|_F / |A - A_k|_F`.
pub fn relative_error_ratio(a: &Matrix, decomp: &CurDecomposition, k: usize) -> Result<f64> {
    let err = reconstruction_error(a, decomp)?;
    let tail = rank_k_tail(a, k)?;
    relative_error_ratio_from_tail(err, tail, a.frobenius_norm())
}

// ---------------------------------------------------------------------------
// serialization

#[derive(Serialize, Deserialize)]
struct MatrixDto {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl MatrixDto {
    fn from(m: &Matrix) -> Self {
        MatrixDto { rows: m.nrows(), cols: m.ncols(), data: m.to_row_major() }
    }

    fn build(self) -> Result<Matrix> {
        Matrix::from_row_major(self.rows, self.cols, &self.data)
    }
}

#[derive(Serialize, Deserialize)]
struct CurDto {
    kind: DecompositionKind,
    c: MatrixDto,
    u: MatrixDto,
    r: MatrixDto,
    col_indices: Vec<usize>,
    row_indices: Vec<usize>,
}

/// JSON serializer that writes every float in scientific notation with 17
/// significant digits, enough for exact `f64` round-trips.
struct SciFloatFormatter;

impl serde_json::ser::Formatter for SciFloatFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

pub(crate) fn to_json_17<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFloatFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Parse(format!("JSON serialization failed: {e}")))?;
    String::from_utf8(buf).map_err(|e| Error::Parse(format!("invalid UTF-8 in JSON: {e}")))
}

impl CurDecomposition {
    /// Serializes to JSON with floats at full `f64` precision (17
    /// significant digits), so a round trip reproduces the factors bitwise.
    pub fn to_json(&self) -> Result<String> {
        let dto = CurDto {
            kind: self.kind.clone(),
            c: MatrixDto::from(&self.c),
            u: MatrixDto::from(&self.u),
            r: MatrixDto::from(&self.r),
            col_indices: self.col_indices.clone(),
            row_indices: self.row_indices.clone(),
        };
        to_json_17(&dto)
    }

    /// Parses the format written by [`CurDecomposition::to_json`],
    /// revalidating shapes and finiteness.
    pub fn from_json(text: &str) -> Result<Self> {
        let dto: CurDto =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
        CurDecomposition::from_parts(
            dto.c.build()?,
            dto.u.build()?,
            dto.r.build()?,
            dto.col_indices,
            dto.row_indices,
            dto.kind,
        )
    }
}
