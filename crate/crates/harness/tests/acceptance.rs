//! Acceptance suite: one test per shipping criterion, each printing a
//! single `ACCEPTANCE n (...): PASS` / `FAIL` line (run with
//! `cargo test --test acceptance -- --nocapture` to see the lines).
//!
//! The tests share a process-wide lock: they are individually heavyweight,
//! several assert wall-clock budgets, and one inspects process-global
//! diagnostics counters, so they must not overlap.

use std::sync::Mutex;
use std::time::Instant;

use fastcur::{
    best_rank_k_in_column_space, diagnostics, dual_set_sparsify, fast_cur, mix_seed,
    orthonormal_basis, project_column_space, project_row_space, randomized_svd, rank_k_tail,
    reconstruction_error, subspace_sampling_cur_with_svd, adaptive_sample_columns,
    adaptive_sample_rows, DualSetInput, Matrix, RngState, ToleranceConfig,
};
use harness::{generate, parse_csv_report, DecayLaw, SyntheticSpec, CSV_HEADER};

static GATE: Mutex<()> = Mutex::new(());

fn hold_gate() -> std::sync::MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

/// Print the criterion verdict line, then enforce it.
fn report(number: usize, description: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {number} ({description}): {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {number} ({description}) failed: {detail}");
}

/// Uniform integer in `0..n`.
fn rand_below(rng: &mut RngState, n: usize) -> usize {
    ((rng.uniform_f64() * n as f64) as usize).min(n - 1)
}

/// `count` distinct uniform indices in `0..n`, in draw order.
fn distinct_indices(rng: &mut RngState, n: usize, count: usize) -> Vec<usize> {
    assert!(count <= n);
    let mut picked = Vec::with_capacity(count);
    while picked.len() < count {
        let idx = rand_below(rng, n);
        if !picked.contains(&idx) {
            picked.push(idx);
        }
    }
    picked
}

/// Max absolute deviation of a square matrix from the identity.
fn max_abs_off_identity(m: &Matrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m.get(i, j) - target).abs());
        }
    }
    worst
}

/// Random matrix with orthonormal factors and singular values in
/// `[0.5, 2]`, so pseudoinverses are well conditioned.
fn well_conditioned(rng: &mut RngState, m: usize, n: usize, rank: usize) -> Matrix {
    let u = orthonormal_basis(&rng.gaussian_matrix(m, rank)).unwrap();
    let v = orthonormal_basis(&rng.gaussian_matrix(n, rank)).unwrap();
    let sigma: Vec<f64> = (0..rank).map(|_| 0.5 + 1.5 * rng.uniform_f64()).collect();
    let scaled = Matrix::from_fn(m, rank, |i, j| u.get(i, j) * sigma[j]);
    &scaled * &v.transpose()
}

#[test]
fn criterion_1_dual_set_guarantees() {
    let _g = hold_gate();
    let start = Instant::now();
    let tol = ToleranceConfig::default();
    let mut detail = String::new();
    let mut pass = true;

    for trial in 0..100u64 {
        let mut rng = RngState::new(mix_seed(&[0xD0A1, trial]));
        let k = 1 + rand_below(&mut rng, 10); // 1..=10
        let r = 2 * k + rand_below(&mut rng, 6 * k + 1); // 2k..=8k
        let n = r + rand_below(&mut rng, 200 - r + 1); // r..=200
        let l = 1 + rand_below(&mut rng, 20); // 1..=20

        let v = orthonormal_basis(&rng.gaussian_matrix(n, k)).unwrap().transpose();
        let x = rng.gaussian_matrix(l, n);
        let input = DualSetInput::new(&x, &v, &tol).unwrap();
        let weights = dual_set_sparsify(&input, r).unwrap();
        let again = dual_set_sparsify(&input, r).unwrap();

        // Deterministic: bitwise identical weights on a second run.
        let deterministic = weights
            .weights
            .iter()
            .zip(&again.weights)
            .all(|(a, b)| a.to_bits() == b.to_bits());

        // At most r nonzero weights.
        let nnz_ok = weights.nonzero_count() <= r;

        // lambda_k of sum s_i v_i v_i^T, via singular values of V*diag(sqrt s).
        let w = Matrix::from_fn(k, n, |i, j| v.get(i, j) * weights.weights[j].sqrt());
        let sv = w.exact_svd(&tol).unwrap();
        let lambda_k = if sv.sigma.len() >= k {
            sv.sigma[k - 1] * sv.sigma[k - 1]
        } else {
            0.0
        };
        let ratio = 1.0 - (k as f64 / r as f64).sqrt();
        let lambda_ok = lambda_k >= ratio * ratio - 1e-9;

        // Weighted x-energy does not exceed the total.
        let x_norms = x.column_norms_sq();
        let weighted: f64 = x_norms.iter().zip(&weights.weights).map(|(nrm, s)| nrm * s).sum();
        let total: f64 = x_norms.iter().sum();
        let trace_ok = weighted <= total + 1e-9 * total;

        if !(deterministic && nnz_ok && lambda_ok && trace_ok) {
            pass = false;
            detail = format!(
                "trial {trial} (k={k}, r={r}, n={n}, l={l}): deterministic={deterministic} \
                 nnz={} (cap {r}) lambda_k={lambda_k:.6} (floor {:.6}) weighted={weighted:.6} \
                 total={total:.6}",
                weights.nonzero_count(),
                ratio * ratio
            );
            break;
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    if pass && elapsed >= 60.0 {
        pass = false;
        detail = format!("took {elapsed:.1}s, budget 60s");
    }
    report(1, "dual-set sparsification guarantees", pass, &detail);
}

#[test]
fn criterion_2_randomized_svd_contract() {
    let _g = hold_gate();
    let start = Instant::now();
    let a = generate(&SyntheticSpec {
        m: 50,
        n: 40,
        rank: 40,
        decay: DecayLaw::Power { exponent: 0.7 },
        noise: 0.0,
        seed: 02_0501,
    })
    .unwrap();
    let tail = rank_k_tail(&a, 5).unwrap();
    let tail_sq = tail * tail;

    let mut sum_sq = 0.0;
    let mut pass = true;
    let mut detail = String::new();
    for trial in 0..200u64 {
        let mut rng = RngState::new(mix_seed(&[0xACC2, trial]));
        let approx = randomized_svd(&a, 5, 0.5, &mut rng).unwrap();
        let residual = approx.residual(&a).unwrap();
        sum_sq += residual.frobenius_norm().powi(2);

        let ztz = &approx.z.transpose() * &approx.z;
        let ortho_defect = max_abs_off_identity(&ztz);
        let annihilation = (&residual * &approx.z).max_abs();
        if ortho_defect > 1e-10 || annihilation > 1e-8 {
            pass = false;
            detail = format!(
                "trial {trial}: Z^T Z off identity by {ortho_defect:.3e}, \
                 residual*Z max {annihilation:.3e}"
            );
            break;
        }
    }
    let mean_sq = sum_sq / 200.0;
    let bound = 1.1 * 1.5 * tail_sq;
    if pass && mean_sq > bound {
        pass = false;
        detail = format!("mean squared residual {mean_sq:.6} exceeds 1.1*(1+eps0)*tail^2 = {bound:.6}");
    }
    let elapsed = start.elapsed().as_secs_f64();
    if pass && elapsed >= 30.0 {
        pass = false;
        detail = format!("took {elapsed:.1}s, budget 30s");
    }
    report(2, "randomized sketch accuracy and orthonormality", pass, &detail);
}

#[test]
fn criterion_3_adaptive_sampling_bounds() {
    let _g = hold_gate();
    let start = Instant::now();
    let tol = ToleranceConfig::default();

    // Column suite: E ||A - CC'A||^2 <= ||A - A_k||^2 + (k/c2) ||A - C1C1'A||^2.
    let a = generate(&SyntheticSpec {
        m: 40,
        n: 30,
        rank: 30,
        decay: DecayLaw::Power { exponent: 0.8 },
        noise: 0.0,
        seed: 03_0701,
    })
    .unwrap();
    let tail3_sq = rank_k_tail(&a, 3).unwrap().powi(2);
    let (k, c1_count, c2_count) = (3usize, 4usize, 8usize);
    let mut lhs_sum = 0.0;
    let mut rhs_sum = 0.0;
    for trial in 0..300u64 {
        let mut rng = RngState::new(mix_seed(&[0xACC3, 0, trial]));
        let c1_idx = distinct_indices(&mut rng, a.ncols(), c1_count);
        let c1 = a.select_columns(&c1_idx).unwrap();
        let e1 = &a - &project_column_space(&a, &c1).unwrap();
        rhs_sum += tail3_sq + (k as f64 / c2_count as f64) * e1.frobenius_norm().powi(2);

        let draws = adaptive_sample_columns(&a, &c1, c2_count, &mut rng).unwrap();
        let c2 = a.select_columns(&draws.indices).unwrap();
        let c = Matrix::hstack(&[&c1, &c2]).unwrap();
        let resid = &a - &project_column_space(&a, &c).unwrap();
        lhs_sum += resid.frobenius_norm().powi(2);
    }
    let columns_ok = lhs_sum / 300.0 <= 1.05 * (rhs_sum / 300.0);
    let columns_detail = format!(
        "columns: mean {:.6} vs bound {:.6}",
        lhs_sum / 300.0,
        1.05 * rhs_sum / 300.0
    );

    // Row suite: E ||A - CC'AR'R||^2 <= ||A - CC'A||^2 + (rank(C)/r2) ||A - AR1'R1||^2.
    let b = generate(&SyntheticSpec {
        m: 50,
        n: 40,
        rank: 40,
        decay: DecayLaw::Power { exponent: 0.8 },
        noise: 0.0,
        seed: 03_0702,
    })
    .unwrap();
    let (c_count, r1_count, r2_count) = (6usize, 5usize, 10usize);
    let mut row_lhs_sum = 0.0;
    let mut row_rhs_sum = 0.0;
    for trial in 0..300u64 {
        let mut rng = RngState::new(mix_seed(&[0xACC3, 1, trial]));
        let c_idx = distinct_indices(&mut rng, b.ncols(), c_count);
        let cmat = b.select_columns(&c_idx).unwrap();
        let r1_idx = distinct_indices(&mut rng, b.nrows(), r1_count);
        let r1 = b.select_rows(&r1_idx).unwrap();

        let rho = cmat.exact_svd(&tol).unwrap().rank();
        let pc_a = project_column_space(&b, &cmat).unwrap();
        let col_resid_sq = (&b - &pc_a).frobenius_norm().powi(2);
        let row_resid_sq = (&b - &project_row_space(&b, &r1).unwrap())
            .frobenius_norm()
            .powi(2);
        row_rhs_sum += col_resid_sq + (rho as f64 / r2_count as f64) * row_resid_sq;

        let draws = adaptive_sample_rows(&b, &r1, r2_count, &mut rng).unwrap();
        let r2 = b.select_rows(&draws.indices).unwrap();
        let r = Matrix::vstack(&[&r1, &r2]).unwrap();
        let approx = project_row_space(&pc_a, &r).unwrap(); // CC'A R'R
        row_lhs_sum += (&b - &approx).frobenius_norm().powi(2);
    }
    let rows_ok = row_lhs_sum / 300.0 <= 1.05 * (row_rhs_sum / 300.0);
    let rows_detail = format!(
        "rows: mean {:.6} vs bound {:.6}",
        row_lhs_sum / 300.0,
        1.05 * row_rhs_sum / 300.0
    );

    let elapsed = start.elapsed().as_secs_f64();
    let in_budget = elapsed < 120.0;
    let pass = columns_ok && rows_ok && in_budget;
    let detail = format!("{columns_detail}; {rows_detail}; elapsed {elapsed:.1}s (budget 120s)");
    report(3, "adaptive sampling error bounds", pass, &detail);
}

#[test]
fn criterion_4_row_projection_identity() {
    let _g = hold_gate();
    let start = Instant::now();
    let tol = ToleranceConfig::default();
    let mut pass = true;
    let mut detail = String::new();

    for trial in 0..50u64 {
        let mut rng = RngState::new(mix_seed(&[0xACC4, trial]));
        let a = well_conditioned(&mut rng, 8, 6, 3);
        let r_idx = distinct_indices(&mut rng, 8, 3);
        let r = a.select_rows(&r_idx).unwrap();

        // A R'R and its top right singular vectors.
        let ar = project_row_space(&a, &r).unwrap();
        let svd = ar.exact_svd(&tol).unwrap();
        let bound = 1e-8 * a.frobenius_norm();
        for j in 0..svd.rank() {
            let vj = Matrix::from_fn(a.ncols(), 1, |i, _| svd.v.get(i, j));
            let deviation = (&(&ar - &a) * &vj).frobenius_norm();
            if deviation > bound {
                pass = false;
                detail = format!(
                    "trial {trial}, singular vector {j}: |(AR'R - A)v| = {deviation:.3e} \
                     exceeds {bound:.3e}"
                );
                break;
            }
        }
        if !pass {
            break;
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    if pass && elapsed >= 10.0 {
        pass = false;
        detail = format!("took {elapsed:.1}s, budget 10s");
    }
    report(4, "row-space projection preserves singular directions", pass, &detail);
}

#[test]
fn criterion_5_fast_cur_error_bound() {
    let _g = hold_gate();
    let start = Instant::now();

    // Power-law spectrum, full rank: the rank-10 tail is substantial.
    let a = generate(&SyntheticSpec {
        m: 300,
        n: 200,
        rank: 200,
        decay: DecayLaw::Power { exponent: 1.0 },
        noise: 0.0,
        seed: 05_1101,
    })
    .unwrap();
    let tail = rank_k_tail(&a, 10).unwrap();

    let mut ratios = Vec::with_capacity(20);
    for trial in 0..20u64 {
        let mut rng = RngState::new(mix_seed(&[0xACC5, 0, trial]));
        let dec = fast_cur(&a, 10, 1.0, &mut rng).unwrap();
        let err = reconstruction_error(&a, &dec).unwrap();
        ratios.push(err / tail);
    }
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let bound_ok = mean_ratio <= 2.0;

    // Exact-rank recovery: a rank-10 input reconstructs to working precision.
    let exact = generate(&SyntheticSpec {
        m: 300,
        n: 200,
        rank: 10,
        decay: DecayLaw::Power { exponent: 1.0 },
        noise: 0.0,
        seed: 05_1102,
    })
    .unwrap();
    let recovery_bound = 1e-6 * exact.frobenius_norm();
    let mut worst_recovery: f64 = 0.0;
    for trial in 0..20u64 {
        let mut rng = RngState::new(mix_seed(&[0xACC5, 1, trial]));
        let dec = fast_cur(&exact, 10, 1.0, &mut rng).unwrap();
        let err = reconstruction_error(&exact, &dec).unwrap();
        worst_recovery = worst_recovery.max(err);
    }
    let recovery_ok = worst_recovery <= recovery_bound;

    let elapsed = start.elapsed().as_secs_f64();
    let in_budget = elapsed < 120.0;
    let pass = bound_ok && recovery_ok && in_budget;
    let detail = format!(
        "mean ratio {mean_ratio:.4} (cap 2.0); worst exact-rank error {worst_recovery:.3e} \
         (cap {recovery_bound:.3e}); elapsed {elapsed:.1}s (budget 120s)"
    );
    report(5, "fast CUR relative-error bound and exact recovery", pass, &detail);
}

#[test]
fn criterion_6_fast_cur_beats_subspace_baseline() {
    let _g = hold_gate();
    let start = Instant::now();
    let tol = ToleranceConfig::default();

    let a = generate(&SyntheticSpec {
        m: 300,
        n: 200,
        rank: 200,
        decay: DecayLaw::Power { exponent: 1.0 },
        noise: 0.0,
        seed: 05_1101,
    })
    .unwrap();
    let tail = rank_k_tail(&a, 10).unwrap();
    let svd = a.exact_svd(&tol).unwrap();

    let mut fast_sum = 0.0;
    let mut base_sum = 0.0;
    for trial in 0..20u64 {
        let mut rng_f = RngState::new(mix_seed(&[0xACC6, 0, trial]));
        let dec_f = fast_cur(&a, 10, 1.0, &mut rng_f).unwrap();
        let (c_real, r_real) = dec_f.realized_counts();
        fast_sum += reconstruction_error(&a, &dec_f).unwrap() / tail;

        // Baseline gets the fast run's realized budgets as its draw counts.
        let mut rng_s = RngState::new(mix_seed(&[0xACC6, 1, trial]));
        let dec_s =
            subspace_sampling_cur_with_svd(&a, &svd, 10, c_real, r_real, &mut rng_s).unwrap();
        base_sum += reconstruction_error(&a, &dec_s).unwrap() / tail;
    }
    let fast_mean = fast_sum / 20.0;
    let base_mean = base_sum / 20.0;

    let elapsed = start.elapsed().as_secs_f64();
    let in_budget = elapsed < 180.0;
    let pass = fast_mean < base_mean && in_budget;
    let detail = format!(
        "fast mean ratio {fast_mean:.4} vs subspace mean ratio {base_mean:.4} at matched \
         budgets; elapsed {elapsed:.1}s (budget 180s)"
    );
    report(6, "fast CUR beats subspace sampling at matched budgets", pass, &detail);
}

#[test]
fn criterion_7_pseudoinverse_and_projection_invariants() {
    let _g = hold_gate();
    let start = Instant::now();
    let tol = ToleranceConfig::default();
    let mut pass = true;
    let mut detail = String::new();

    for trial in 0..200u64 {
        let mut rng = RngState::new(mix_seed(&[0xACC7, trial]));
        let m = 2 + rand_below(&mut rng, 14);
        let n = 2 + rand_below(&mut rng, 14);
        let rank = 1 + rand_below(&mut rng, m.min(n));
        let a = well_conditioned(&mut rng, m, n, rank);

        let pinv = a.pseudoinverse(&tol).unwrap();
        let apa = &(&a * &pinv) * &a;
        let pap = &(&pinv * &a) * &pinv;
        let ap = &a * &pinv;
        let pa = &pinv * &a;
        let penrose = [
            (&apa - &a).max_abs(),
            (&pap - &pinv).max_abs(),
            (&ap.transpose() - &ap).max_abs(),
            (&pa.transpose() - &pa).max_abs(),
        ];
        if penrose.iter().any(|&d| d > 1e-9) {
            pass = false;
            detail = format!("trial {trial}: Penrose residuals {penrose:?} exceed 1e-9");
            break;
        }

        let j = 1 + rand_below(&mut rng, m.min(5));
        let x = rng.gaussian_matrix(m, j);
        let proj = project_column_space(&a, &x).unwrap();
        let proj2 = project_column_space(&proj, &x).unwrap();
        let idempotency = (&proj2 - &proj).max_abs();
        if idempotency > 1e-10 {
            pass = false;
            detail = format!("trial {trial}: projection idempotency defect {idempotency:.3e}");
            break;
        }

        let k = 1 + rand_below(&mut rng, j);
        let constrained = best_rank_k_in_column_space(&a, &x, k).unwrap();
        let full_err = (&a - &proj).frobenius_norm();
        let constrained_err = (&a - &constrained).frobenius_norm();
        if full_err > constrained_err + 1e-10 {
            pass = false;
            detail = format!(
                "trial {trial}: unconstrained projection error {full_err:.6} exceeds \
                 rank-{k} constrained error {constrained_err:.6}"
            );
            break;
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    if pass && elapsed >= 30.0 {
        pass = false;
        detail = format!("took {elapsed:.1}s, budget 30s");
    }
    report(7, "pseudoinverse and projection invariants", pass, &detail);
}

#[test]
fn criterion_8_benchmark_protocol_reproducible() {
    let _g = hold_gate();
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/desk_bench.json");

    let mut texts = Vec::new();
    for name in ["first.csv", "second.csv"] {
        let out = dir.path().join(name);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_fastcur"))
            .args(["bench", "--config", config, "--out"])
            .arg(&out)
            .stderr(std::process::Stdio::null())
            .status()
            .expect("benchmark binary runs");
        assert!(status.success(), "bench run failed with {status}");
        texts.push(std::fs::read_to_string(&out).unwrap());
    }

    let mut pass = true;
    let mut detail = String::new();

    if !texts[0].starts_with(&format!("{CSV_HEADER}\n")) {
        pass = false;
        detail = "report does not start with the documented CSV header".into();
    }

    let first = parse_csv_report(&texts[0]).unwrap();
    let second = parse_csv_report(&texts[1]).unwrap();
    if pass && first.len() != 30 {
        // 15 runnable grid cells (7 + 5 + 3 across k) x 2 algorithms.
        pass = false;
        detail = format!("expected 30 report rows, found {}", first.len());
    }
    if pass {
        for (a, b) in first.iter().zip(&second) {
            let stats_match = a.algorithm == b.algorithm
                && a.k == b.k
                && a.alpha.to_bits() == b.alpha.to_bits()
                && a.realized_c.to_bits() == b.realized_c.to_bits()
                && a.realized_r.to_bits() == b.realized_r.to_bits()
                && a.ratio_mean.to_bits() == b.ratio_mean.to_bits()
                && a.ratio_std.to_bits() == b.ratio_std.to_bits()
                && a.trials == b.trials
                && a.errors == b.errors;
            let well_formed = a.trials == 20
                && a.errors == 0
                && a.ratio_mean.is_finite()
                && a.ratio_mean > 0.0
                && a.ratio_std >= 0.0
                && a.time_mean_seconds > 0.0;
            if !(stats_match && well_formed) {
                pass = false;
                detail = format!(
                    "row ({}, k={}, alpha={}): stats_match={stats_match} well_formed={well_formed}",
                    a.algorithm, a.k, a.alpha
                );
                break;
            }
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    if pass && elapsed >= 600.0 {
        pass = false;
        detail = format!("took {elapsed:.1}s, budget 600s");
    }
    report(8, "benchmark protocol determinism", pass, &detail);
}

#[test]
fn criterion_9_scales_without_full_svd() {
    let _g = hold_gate();
    let a = generate(&SyntheticSpec {
        m: 2000,
        n: 1000,
        rank: 40,
        decay: DecayLaw::Power { exponent: 1.0 },
        noise: 0.02,
        seed: 09_1301,
    })
    .unwrap();

    diagnostics::reset();
    let mut rng = RngState::new(mix_seed(&[0xACC9, 0]));
    let start = Instant::now();
    let dec = fast_cur(&a, 10, 1.0, &mut rng).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    let exact_calls = diagnostics::exact_svd_calls();
    let engine_calls = diagnostics::svd_engine_calls();
    let widest = diagnostics::svd_engine_max_min_dim();

    // Evaluation (after the counters are read) sanity-checks the output.
    let err = reconstruction_error(&a, &dec).unwrap();

    let pass = elapsed < 60.0
        && exact_calls == 0
        && engine_calls > 0
        && widest <= 200
        && err.is_finite()
        && err < a.frobenius_norm();
    let detail = format!(
        "elapsed {elapsed:.2}s (budget 60s); exact SVD calls {exact_calls} (must be 0); \
         internal factorizations {engine_calls}, widest min-dimension {widest} on a \
         2000x1000 input; error {err:.3e}"
    );
    report(9, "large-input runtime and no full SVD", pass, &detail);
}
