//! Property-based tests: algebraic identities and structural invariants
//! that must hold on arbitrary (small) inputs, not just hand-picked ones.

use fastcur::{
    best_rank_k_in_column_space, dual_set_sparsify, orthonormal_basis, project_column_space,
    sample_iid, Distribution, DualSetInput, Matrix, RngState, ToleranceConfig,
};
use proptest::prelude::*;

/// Strategy: dense matrix with entries in [-1, 1].
fn matrix_strategy(
    rows: std::ops::RangeInclusive<usize>,
    cols: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Matrix> {
    (rows, cols).prop_flat_map(|(m, n)| {
        proptest::collection::vec(-1.0_f64..1.0, m * n)
            .prop_map(move |data| Matrix::from_row_major(m, n, &data).unwrap())
    })
}

/// Condition number of the retained spectrum (1 for the zero matrix).
fn retained_condition(a: &Matrix) -> f64 {
    let f = a.exact_svd(&ToleranceConfig::default()).unwrap();
    match (f.sigma.first(), f.sigma.last()) {
        (Some(&hi), Some(&lo)) => hi / lo,
        _ => 1.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// The four defining identities of the Moore–Penrose pseudoinverse.
    #[test]
    fn pseudoinverse_satisfies_penrose_identities(a in matrix_strategy(1..=7, 1..=7)) {
        // Accuracy degrades with conditioning; skip the (rare) borderline-
        // rank cases where any tolerance choice would be arbitrary.
        prop_assume!(retained_condition(&a) < 1e6);
        let p = a.pseudoinverse(&ToleranceConfig::default()).unwrap();
        let apa = &(&a * &p) * &a;
        let pap = &(&p * &a) * &p;
        let ap = &a * &p;
        let pa = &p * &a;
        let scale = 1.0 + a.max_abs() * p.max_abs();
        prop_assert!((&apa - &a).max_abs() <= 1e-8 * scale);
        prop_assert!((&pap - &p).max_abs() <= 1e-8 * scale * p.max_abs().max(1.0));
        prop_assert!((&ap - &ap.transpose()).max_abs() <= 1e-8 * scale);
        prop_assert!((&pa - &pa.transpose()).max_abs() <= 1e-8 * scale);
    }

    /// Column-space projection is idempotent and never increases norms.
    #[test]
    fn projection_is_idempotent_and_contractive(
        a in matrix_strategy(2..=8, 1..=6),
        cols in 1_usize..=3,
        seed in 0_u64..1000,
    ) {
        let x = RngState::new(seed).gaussian_matrix(a.nrows(), cols);
        let p1 = project_column_space(&a, &x).unwrap();
        let p2 = project_column_space(&p1, &x).unwrap();
        let scale = a.frobenius_norm().max(1.0);
        prop_assert!((&p2 - &p1).frobenius_norm() <= 1e-9 * scale);
        prop_assert!(p1.frobenius_norm() <= a.frobenius_norm() * (1.0 + 1e-9));
        prop_assert!((&a - &p1).frobenius_norm() <= a.frobenius_norm() * (1.0 + 1e-9));
    }

    /// Constraining a rank-k approximation to a subspace can only lose
    /// accuracy relative to the unconstrained rank-k approximation.
    #[test]
    fn constrained_rank_k_never_beats_unconstrained(
        a in matrix_strategy(3..=8, 3..=8),
        k in 1_usize..=2,
        cols in 2_usize..=4,
        seed in 0_u64..1000,
    ) {
        prop_assume!(k < a.nrows().min(a.ncols()));
        let x = RngState::new(seed).gaussian_matrix(a.nrows(), cols);
        let constrained = best_rank_k_in_column_space(&a, &x, k).unwrap();
        let unconstrained = a.best_rank_k(k).unwrap();
        let err_c = (&a - &constrained).frobenius_norm();
        let err_u = (&a - &unconstrained).frobenius_norm();
        prop_assert!(err_c + 1e-9 * err_u.max(1.0) >= err_u);
    }

    /// Numerical rank is invariant under column permutation.
    #[test]
    fn svd_rank_is_permutation_invariant(
        a in matrix_strategy(2..=7, 2..=7),
        perm_seed in 0_u64..1000,
    ) {
        let n = a.ncols();
        // seeded Fisher-Yates permutation of the column indices
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = RngState::new(perm_seed);
        for i in (1..n).rev() {
            let j = (rng.uniform_f64() * (i + 1) as f64) as usize;
            order.swap(i, j.min(i));
        }
        let permuted = a.select_columns(&order).unwrap();
        let tol = ToleranceConfig::default();
        let rank_a = a.exact_svd(&tol).unwrap().rank();
        let rank_p = permuted.exact_svd(&tol).unwrap().rank();
        prop_assert_eq!(rank_a, rank_p);
    }

    /// Truncation error is monotone nonincreasing in the rank.
    #[test]
    fn rank_k_error_is_monotone(a in matrix_strategy(3..=8, 3..=8)) {
        let maxk = a.nrows().min(a.ncols());
        let mut prev = f64::INFINITY;
        for k in 1..=maxk {
            let err = (&a - &a.best_rank_k(k).unwrap()).frobenius_norm();
            prop_assert!(err <= prev + 1e-10);
            prev = err;
        }
    }

    /// Normalized distributions sum to one and never emit zero-probability
    /// indices.
    #[test]
    fn distributions_are_normalized_and_faithful(
        weights in proptest::collection::vec(0.0_f64..10.0, 1..20),
        seed in 0_u64..1000,
    ) {
        prop_assume!(weights.iter().sum::<f64>() > 0.0);
        let d = Distribution::new(&weights).unwrap();
        let total: f64 = d.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let sample = sample_iid(&d, 64, &mut RngState::new(seed));
        for &ix in &sample.indices {
            prop_assert!(ix < weights.len());
            prop_assert!(d.probs()[ix] > 0.0);
        }
    }

    /// The sparsifier's three guarantees hold on arbitrary small instances:
    /// support size, smallest eigenvalue, and trace budget.
    #[test]
    fn dual_set_guarantees_hold_on_random_instances(
        k in 1_usize..=3,
        extra in 2_usize..=8,
        norms_seed in 0_u64..1000,
        v_seed in 0_u64..1000,
        r_offset in 1_usize..=4,
    ) {
        let n = k + extra + 4;
        let r = (k + r_offset).min(n);
        let g = RngState::new(v_seed).gaussian_matrix(n, k);
        let v = orthonormal_basis(&g).unwrap().transpose(); // k x n, isotropic columns
        let norms: Vec<f64> = RngState::new(norms_seed)
            .gaussian_matrix(1, n)
            .to_row_major()
            .iter()
            .map(|x| x * x)
            .collect();
        let input = DualSetInput::from_column_norms(&norms, &v, &ToleranceConfig::default()).unwrap();
        let w = dual_set_sparsify(&input, r).unwrap();

        prop_assert!(w.nonzero_count() <= r);

        // smallest eigenvalue of sum s_i v_i v_iᵀ
        let weighted = Matrix::from_fn(k, n, |i, j| v.get(i, j) * w.weights[j]);
        let gram = &weighted * &v.transpose();
        let f = gram.exact_svd(&ToleranceConfig::default()).unwrap();
        let lam_min = f.sigma.last().copied().unwrap_or(0.0);
        let have_rank = f.rank() == k;
        let bound = (1.0 - (k as f64 / r as f64).sqrt()).powi(2);
        prop_assert!(have_rank && lam_min >= bound - 1e-9,
            "lambda_min {} below bound {}", lam_min, bound);

        let total: f64 = norms.iter().sum();
        let weighted_trace: f64 = norms.iter().zip(&w.weights).map(|(ns, s)| ns * s).sum();
        prop_assert!(weighted_trace <= total * (1.0 + 1e-9) + 1e-12);
    }
}
