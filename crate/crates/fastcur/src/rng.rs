//! Deterministic, splittable random number generation.
//!
//! Every randomized routine in this crate draws from an explicit [`RngState`]
//! so that a 64-bit seed fully determines its output, on every platform.
//!
//! Internals: ChaCha8 (from `rand_chacha`, value-stable across platforms and
//! pinned minor versions) keyed by the seed through `seed_from_u64`, with the
//! cipher's independent stream counter used for splitting. Gaussian variates
//! come from `rand_distr::StandardNormal` (ziggurat over the same stream);
//! uniform `f64` values use the standard 53-bit mantissa construction on
//! `[0, 1)`. Matrices are filled in row-major draw order.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};

use crate::matrix::Matrix;

/// SplitMix64 step: the mixing function used to derive seeds and streams.
///
/// This is the documented combiner for anything that needs to fold several
/// integers into one seed (e.g. per-trial seeds in a benchmark grid).
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a sequence of words into a single 64-bit seed by chained SplitMix64.
///
/// `mix_seed(&[a, b])` differs from `mix_seed(&[b, a])`: order is significant.
pub fn mix_seed(parts: &[u64]) -> u64 {
    let mut acc = 0x51_7c_c1b7_2722_0a95; // arbitrary fixed offset basis
    for &p in parts {
        acc = splitmix64(acc ^ p);
    }
    acc
}

/// Seeded, splittable generator state.
///
/// Cloning copies the position within the stream; [`RngState::substream`]
/// derives an independent generator that shares the seed but never overlaps
/// the parent's output.
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngState {
    /// Generator for `seed`, on stream 0.
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Generator for `seed` on an explicit stream index.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngState { seed, stream, rng }
    }

    /// The seed this generator was created with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The stream index this generator runs on.
    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Derives an independent generator: same seed, a new stream obtained by
    /// mixing `tag` into the current stream index. Distinct tags give
    /// non-overlapping output sequences regardless of how much either
    /// generator has produced.
    pub fn substream(&self, tag: u64) -> RngState {
        Self::with_stream(self.seed, splitmix64(self.stream ^ splitmix64(tag)))
    }

    /// Uniform draw on `[0, 1)` (53-bit resolution).
    pub fn uniform_f64(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Standard normal draw.
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// `rows x cols` matrix of i.i.d. standard normals, filled row by row.
    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> Matrix {
        let data: Vec<f64> = (0..rows * cols).map(|_| self.standard_normal()).collect();
        Matrix::from_row_major(rows, cols, &data)
            .expect("gaussian entries are finite and dims are positive")
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RngState::new(42);
        let mut b = RngState::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let (mut a, mut b) = (RngState::new(42), RngState::new(42));
        for _ in 0..100 {
            assert_eq!(a.uniform_f64().to_bits(), b.uniform_f64().to_bits());
            assert_eq!(a.standard_normal().to_bits(), b.standard_normal().to_bits());
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = RngState::new(1);
        let mut b = RngState::new(2);
        let same = (0..16).filter(|_| a.next_u64() == b.next_u64()).count();
        assert!(same < 16);
    }

    #[test]
    fn substreams_are_independent_of_parent_position() {
        // Deriving a substream must not depend on how much the parent drew.
        let parent1 = RngState::new(7);
        let mut parent2 = RngState::new(7);
        for _ in 0..50 {
            parent2.next_u64();
        }
        let mut s1 = parent1.substream(3);
        let mut s2 = parent2.substream(3);
        for _ in 0..20 {
            assert_eq!(s1.next_u64(), s2.next_u64());
        }
        // ...and distinct tags give distinct sequences.
        let mut t1 = parent1.substream(4);
        let same = (0..16).filter(|_| s1.next_u64() == t1.next_u64()).count();
        assert!(same < 16);
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut rng = RngState::new(9);
        for _ in 0..10_000 {
            let u = rng.uniform_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn gaussian_matrix_is_row_major_ordered() {
        // Filling a matrix must consume the stream in row-major order: the
        // (0,1) entry of a 2x2 fill equals the second scalar draw.
        let mut rng = RngState::new(5);
        let m = rng.gaussian_matrix(2, 2);
        let mut rng2 = RngState::new(5);
        let draws: Vec<f64> = (0..4).map(|_| rng2.standard_normal()).collect();
        assert_eq!(m.get(0, 0).to_bits(), draws[0].to_bits());
        assert_eq!(m.get(0, 1).to_bits(), draws[1].to_bits());
        assert_eq!(m.get(1, 0).to_bits(), draws[2].to_bits());
        assert_eq!(m.get(1, 1).to_bits(), draws[3].to_bits());
    }

    #[test]
    fn mix_seed_is_order_sensitive() {
        assert_ne!(mix_seed(&[1, 2]), mix_seed(&[2, 1]));
        assert_ne!(mix_seed(&[0]), mix_seed(&[0, 0]));
        assert_eq!(mix_seed(&[10, 20, 30]), mix_seed(&[10, 20, 30]));
    }

    /// Frozen first outputs for seed 0xFA57_C0DE: pins the generator's
    /// cross-platform value stability. If this test ever fails after a
    /// dependency bump, the stream changed and every seeded result in the
    /// project changes with it — that is a breaking change, not a flake.
    #[test]
    fn golden_sequence_pin() {
        let mut rng = RngState::new(0xFA57_C0DE);
        let got: Vec<u64> = (0..4).map(|_| rng.next_u64()).collect();
        let expect = golden::FIRST_U64S;
        assert_eq!(got, expect, "ChaCha8 stream changed for fixed seed");
    }

    mod golden {
        /// First four u64 draws for seed 0xFA57_C0DE, stream 0.
        pub const FIRST_U64S: [u64; 4] = [
            0xf863_dbec_777a_c7c9,
            0x3124_f9af_bf75_e8cf,
            0x0756_e8e4_efa5_6cbc,
            0xfaa2_462a_5112_441e,
        ];
    }
}
