//! Process-wide counters describing the factorization work performed so far.
//!
//! Used by tests and benchmarks to verify structural claims about the
//! algorithms — e.g. that a randomized decomposition of a large matrix never
//! triggered a full-size SVD — without instrumenting call sites by hand.
//! All counters are monotone between calls to [`reset`] and are updated with
//! relaxed atomics: they are observational, not synchronization points.

use std::sync::atomic::{AtomicU64, Ordering};

static SVD_ENGINE_CALLS: AtomicU64 = AtomicU64::new(0);
static SVD_ENGINE_MAX_MIN_DIM: AtomicU64 = AtomicU64::new(0);
static EXACT_SVD_CALLS: AtomicU64 = AtomicU64::new(0);

/// Zeroes every counter. Tests that assert on counters should reset first
/// and run the measured region single-threaded.
pub fn reset() {
    SVD_ENGINE_CALLS.store(0, Ordering::Relaxed);
    SVD_ENGINE_MAX_MIN_DIM.store(0, Ordering::Relaxed);
    EXACT_SVD_CALLS.store(0, Ordering::Relaxed);
}

/// Number of singular value decompositions performed (all callers).
pub fn svd_engine_calls() -> u64 {
    SVD_ENGINE_CALLS.load(Ordering::Relaxed)
}

/// Largest `min(rows, cols)` among all decomposed matrices — the size of the
/// biggest spectral problem actually solved.
pub fn svd_engine_max_min_dim() -> u64 {
    SVD_ENGINE_MAX_MIN_DIM.load(Ordering::Relaxed)
}

/// Number of calls to the public exact-SVD entry point (a subset of
/// [`svd_engine_calls`]).
pub fn exact_svd_calls() -> u64 {
    EXACT_SVD_CALLS.load(Ordering::Relaxed)
}

pub(crate) fn record_svd_shape(rows: usize, cols: usize) {
    SVD_ENGINE_CALLS.fetch_add(1, Ordering::Relaxed);
    SVD_ENGINE_MAX_MIN_DIM.fetch_max(rows.min(cols) as u64, Ordering::Relaxed);
}

pub(crate) fn record_exact_svd() {
    EXACT_SVD_CALLS.fetch_add(1, Ordering::Relaxed);
}
