//! Deterministic dual-set sparsification.
//!
//! Given two synchronized vector families — arbitrary vectors `x_1..x_n`
//! (entering only through their squared norms) and isotropic vectors
//! `v_1..v_n` in `R^k` with `sum v_i v_iᵀ = I_k` — this routine computes
//! nonnegative weights `s` with at most `r` nonzeros such that
//!
//! * `lambda_k(sum_i s_i v_i v_iᵀ) >= (1 - sqrt(k/r))^2`, and
//! * `sum_i s_i |x_i|^2 <= sum_i |x_i|^2`.
//!
//! The construction is a two-barrier potential argument run for exactly `r`
//! steps: a lower barrier chases the smallest eigenvalue of the growing
//! Gram matrix of the `v` side upward, while a trace budget keeps the `x`
//! side from inflating. Each step picks the smallest index whose barrier
//! functions leave room for a positive weight, making the whole procedure
//! deterministic — identical inputs give identical weights, with no
//! randomness anywhere.
//!
//! Cost: `r` iterations, each dominated by a `k x k` symmetric
//! eigendecomposition and a `k x k` by `k x n` product.

use std::io::Write as IoWrite;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, ToleranceConfig};

/// Iteration budget for the per-step symmetric eigensolver.
const EIGEN_MAX_SWEEPS: usize = 100_000;

/// Relative slack when comparing the two barrier functions for feasibility;
/// absorbs roundoff in an otherwise strict inequality.
const FEASIBILITY_SLACK: f64 = 1e-9;

/// Validated input pair for [`dual_set_sparsify`].
///
/// `v` is `k x n` with one isotropic vector per column; the `x` family is
/// kept only as per-vector squared norms (that is all the algorithm reads).
#[derive(Debug, Clone)]
pub struct DualSetInput {
    norms_sq: Vec<f64>,
    v: Matrix,
}

impl DualSetInput {
    /// Builds the input from the full `x` matrix (one vector per column).
    pub fn new(x: &Matrix, v: &Matrix, tol: &ToleranceConfig) -> Result<Self> {
        if x.ncols() != v.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "x has {} columns, v has {}",
                x.ncols(),
                v.ncols()
            )));
        }
        Self::from_column_norms(&x.column_norms_sq(), v, tol)
    }

    /// Builds the input from precomputed squared norms of the `x` vectors.
    ///
    /// Checks that `v vᵀ = I_k` within `tol.orthogonality` (max-abs), since
    /// every guarantee of the sparsifier rides on isotropy of the `v` side.
    pub fn from_column_norms(norms_sq: &[f64], v: &Matrix, tol: &ToleranceConfig) -> Result<Self> {
        let (k, n) = v.shape();
        if norms_sq.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} norms for {} vectors",
                norms_sq.len(),
                n
            )));
        }
        if k > n {
            return Err(Error::InvalidInput(format!(
                "isotropic family of dimension {k} needs at least {k} vectors, got {n}"
            )));
        }
        if let Some(bad) = norms_sq.iter().find(|&&s| !(s.is_finite() && s >= 0.0)) {
            return Err(Error::InvalidInput(format!("invalid squared norm {bad}")));
        }
        let defect = crate::matrix::orthonormality_defect(&v.transpose());
        if defect > tol.orthogonality {
            return Err(Error::NotOrthonormal { max_deviation: defect });
        }
        Ok(DualSetInput { norms_sq: norms_sq.to_vec(), v: v.clone() })
    }

    pub fn k(&self) -> usize {
        self.v.nrows()
    }

    pub fn n(&self) -> usize {
        self.v.ncols()
    }

    pub fn column_norms_sq(&self) -> &[f64] {
        &self.norms_sq
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }
}

/// Output of the sparsifier: one nonnegative weight per input vector.
#[derive(Debug, Clone)]
pub struct WeightVector {
    pub weights: Vec<f64>,
}

impl WeightVector {
    /// Indices with strictly positive weight, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn nonzero_count(&self) -> usize {
        self.weights.iter().filter(|&&w| w > 0.0).count()
    }
}

/// One step of the barrier loop, for post-hoc inspection of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRecord {
    /// Step number, `0..r`.
    pub iteration: usize,
    /// Index the step added weight to.
    pub chosen_index: usize,
    /// Unscaled weight added at this step.
    pub weight: f64,
    /// Smallest eigenvalue of the `v`-side Gram matrix before the update.
    pub lambda_min: f64,
    /// Lower barrier position at this step.
    pub lower_barrier: f64,
    /// Potential increase from advancing the barrier (always positive).
    pub potential_gap: f64,
}

/// Writes trace records as line-delimited JSON.
pub fn write_trace<W: IoWrite>(records: &[TraceRecord], mut out: W) -> std::io::Result<()> {
    for rec in records {
        serde_json::to_writer(&mut out, rec).map_err(std::io::Error::other)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Barrier potential `sum_i 1 / (lambda_i - shift)`.
///
/// Defined only while every eigenvalue sits strictly above the shift;
/// otherwise the barrier has been crossed and [`Error::SingularShift`] is
/// returned.
pub fn potential_phi(shift: f64, eigenvalues: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for &lam in eigenvalues {
        let d = lam - shift;
        if d <= 0.0 {
            return Err(Error::SingularShift { shift });
        }
        acc += 1.0 / d;
    }
    Ok(acc)
}

/// Runs the sparsifier; see the module docs for the guarantees.
///
/// Requires `k < r <= n`. The returned weights are already scaled by
/// `(1 - sqrt(k/r)) / r`, so the guarantees read directly off
/// `sum s_i v_i v_iᵀ` and `sum s_i |x_i|^2`.
pub fn dual_set_sparsify(input: &DualSetInput, r: usize) -> Result<WeightVector> {
    Ok(run_barrier_loop(input, r, false)?.0)
}

/// [`dual_set_sparsify`] that also returns one [`TraceRecord`] per step.
pub fn dual_set_sparsify_traced(
    input: &DualSetInput,
    r: usize,
) -> Result<(WeightVector, Vec<TraceRecord>)> {
    run_barrier_loop(input, r, true)
}

fn run_barrier_loop(
    input: &DualSetInput,
    r: usize,
    keep_trace: bool,
) -> Result<(WeightVector, Vec<TraceRecord>)> {
    let k = input.k();
    let n = input.n();
    if r <= k {
        return Err(Error::InvalidInput(format!(
            "sparsification target r = {r} must exceed the isotropic dimension k = {k}"
        )));
    }
    if r > n {
        return Err(Error::InvalidInput(format!(
            "sparsification target r = {r} exceeds the number of vectors n = {n}"
        )));
    }

    let ratio = (k as f64 / r as f64).sqrt(); // < 1 since r > k
    let total_norm_sq: f64 = input.norms_sq.iter().sum();
    let delta_u = total_norm_sq / (1.0 - ratio);
    let rk_root = (r as f64 * k as f64).sqrt();

    let mut weights = vec![0.0_f64; n];
    let mut gram: DMatrix<f64> = DMatrix::zeros(k, k);
    let mut trace = Vec::with_capacity(if keep_trace { r } else { 0 });

    for tau in 0..r {
        let lower = tau as f64 - rk_root;
        let alpha = lower + 1.0;

        let eig = SymmetricEigen::try_new(gram.clone(), f64::EPSILON, EIGEN_MAX_SWEEPS)
            .ok_or(Error::ConvergenceFailure)?;
        let lambdas: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let lambda_min = lambdas.iter().copied().fold(f64::INFINITY, f64::min);

        // Barrier safety: the potential bound keeps lambda_min more than one
        // unit above the barrier, so both shifts must be resolvable.
        let phi_alpha = potential_phi(alpha, &lambdas)?;
        let phi_lower = potential_phi(lower, &lambdas)?;
        let potential_gap = phi_alpha - phi_lower;
        if !(potential_gap.is_finite() && potential_gap > 0.0) {
            return Err(Error::NoFeasibleIndex { iteration: tau });
        }

        // g[(i, j)] = w_iᵀ v_j in the eigenbasis of the Gram matrix, so
        // resolvent quadratic forms become weighted coordinate sums.
        let g = eig.eigenvectors.transpose() * input.v.inner();

        let mut chosen: Option<(usize, f64)> = None;
        for j in 0..n {
            let mut inv1 = 0.0_f64; // v_jᵀ (A - alpha I)^{-1} v_j
            let mut inv2 = 0.0_f64; // v_jᵀ (A - alpha I)^{-2} v_j
            for i in 0..k {
                let gij = g[(i, j)];
                let d = lambdas[i] - alpha;
                inv1 += gij * gij / d;
                inv2 += gij * gij / (d * d);
            }
            // Largest admissible 1/t on the eigenvalue side...
            let ub = inv2 / potential_gap - inv1;
            // ...and smallest admissible 1/t on the trace side.
            let lb = if delta_u > 0.0 { input.norms_sq[j] / delta_u } else { 0.0 };
            let feasible =
                ub > 0.0 && ub - lb >= -FEASIBILITY_SLACK * (ub.abs() + lb.abs());
            if feasible {
                chosen = Some((j, 2.0 / (lb + ub)));
                break;
            }
        }

        let (j, t) = chosen.ok_or(Error::NoFeasibleIndex { iteration: tau })?;
        weights[j] += t;

        // Symmetric rank-one update of the Gram matrix, mirrored exactly.
        for p in 0..k {
            let tv = t * input.v.get(p, j);
            for q in p..k {
                gram[(p, q)] += tv * input.v.get(q, j);
                if q != p {
                    gram[(q, p)] = gram[(p, q)];
                }
            }
        }

        if keep_trace {
            trace.push(TraceRecord {
                iteration: tau,
                chosen_index: j,
                weight: t,
                lambda_min,
                lower_barrier: lower,
                potential_gap,
            });
        }
    }

    let scale = (1.0 - ratio) / r as f64;
    for w in &mut weights {
        *w *= scale;
    }
    Ok((WeightVector { weights }, trace))
}
