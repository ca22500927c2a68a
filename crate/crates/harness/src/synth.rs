//! Synthetic test-matrix generation.
//!
//! Matrices are built as `U * diag(sigma) * V^T + noise` where `U` and `V`
//! have orthonormal columns obtained from seeded Gaussian draws and the
//! spectrum `sigma` follows a configurable decay law. The noise term, when
//! requested, is scaled so its Frobenius norm is exactly `noise` times the
//! norm of the signal, which makes the best rank-`k` error of the result
//! predictable in tests.
//!
//! Generation is deterministic in the seed: draws happen in a fixed order
//! (`U`, then `V`, then noise) from a single counter-based stream.

use fastcur::{orthonormal_basis, Matrix, RngState};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Singular-value decay profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayLaw {
    /// `sigma_i = (i + 1)^(-exponent)` for `i = 0, 1, ...`; `exponent > 0`.
    Power { exponent: f64 },
    /// `sigma_i = base^i` with `base` in `(0, 1]`.
    Exponential { base: f64 },
}

impl DecayLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            DecayLaw::Power { exponent } => {
                if !exponent.is_finite() || exponent <= 0.0 {
                    return Err(HarnessError::Usage(format!(
                        "power decay exponent must be positive and finite, got {exponent}"
                    )));
                }
            }
            DecayLaw::Exponential { base } => {
                if !base.is_finite() || base <= 0.0 || base > 1.0 {
                    return Err(HarnessError::Usage(format!(
                        "exponential decay base must lie in (0, 1], got {base}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The `i`-th singular value (0-based) under this law.
    pub fn sigma(&self, i: usize) -> f64 {
        match *self {
            DecayLaw::Power { exponent } => ((i + 1) as f64).powf(-exponent),
            DecayLaw::Exponential { base } => base.powi(i as i32),
        }
    }
}

/// Recipe for one synthetic matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    /// Number of rows.
    pub m: usize,
    /// Number of columns.
    pub n: usize,
    /// Number of nonzero singular values in the signal part.
    pub rank: usize,
    /// Spectrum decay law.
    pub decay: DecayLaw,
    /// Noise Frobenius norm relative to the signal Frobenius norm (>= 0).
    pub noise: f64,
    /// Generation seed.
    pub seed: u64,
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(HarnessError::Usage(format!(
                "matrix dimensions must be positive, got {}x{}",
                self.m, self.n
            )));
        }
        if self.rank == 0 || self.rank > self.m.min(self.n) {
            return Err(HarnessError::Usage(format!(
                "rank {} must lie in 1..={} for a {}x{} matrix",
                self.rank,
                self.m.min(self.n),
                self.m,
                self.n
            )));
        }
        if !self.noise.is_finite() || self.noise < 0.0 {
            return Err(HarnessError::Usage(format!(
                "noise level must be finite and non-negative, got {}",
                self.noise
            )));
        }
        self.decay.validate()
    }

    /// Parse the compact command-line form
    /// `m,n,rank,<power|exp>,<param>,<noise>`, e.g. `1000,400,60,power,1.0,0.05`.
    pub fn parse_cli(text: &str, seed: u64) -> Result<Self> {
        let usage = || {
            HarnessError::Usage(format!(
                "invalid synthetic spec {text:?}; expected m,n,rank,<power|exp>,<param>,<noise> \
                 such as 1000,400,60,power,1.0,0.05"
            ))
        };
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(usage());
        }
        let m: usize = parts[0].parse().map_err(|_| usage())?;
        let n: usize = parts[1].parse().map_err(|_| usage())?;
        let rank: usize = parts[2].parse().map_err(|_| usage())?;
        let param: f64 = parts[4].parse().map_err(|_| usage())?;
        let noise: f64 = parts[5].parse().map_err(|_| usage())?;
        let decay = match parts[3] {
            "power" => DecayLaw::Power { exponent: param },
            "exp" | "exponential" => DecayLaw::Exponential { base: param },
            _ => return Err(usage()),
        };
        let spec = SyntheticSpec {
            m,
            n,
            rank,
            decay,
            noise,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The signal spectrum, largest first.
    pub fn spectrum(&self) -> Vec<f64> {
        (0..self.rank).map(|i| self.decay.sigma(i)).collect()
    }
}

/// Generate the matrix described by `spec`.
pub fn generate(spec: &SyntheticSpec) -> Result<Matrix> {
    spec.validate()?;
    let mut rng = RngState::new(spec.seed);

    // Fixed draw order: U factor, V factor, then noise. Changing this order
    // would silently change every seeded benchmark, so it is part of the
    // format.
    let u_raw = rng.gaussian_matrix(spec.m, spec.rank);
    let v_raw = rng.gaussian_matrix(spec.n, spec.rank);
    let u = orthonormal_basis(&u_raw).map_err(|e| HarnessError::Numerical(e.to_string()))?;
    let v = orthonormal_basis(&v_raw).map_err(|e| HarnessError::Numerical(e.to_string()))?;
    if u.ncols() < spec.rank || v.ncols() < spec.rank {
        // Gaussian draws are full rank with probability one; treat the
        // alternative as a numerical failure rather than silently shrinking.
        return Err(HarnessError::Numerical(
            "random factors lost rank during orthonormalization".into(),
        ));
    }

    let sigma = spec.spectrum();
    // U * diag(sigma): scale each column of U.
    let scaled = Matrix::from_fn(spec.m, spec.rank, |i, j| u.get(i, j) * sigma[j]);
    let signal = &scaled * &v.transpose();

    if spec.noise == 0.0 {
        return Ok(signal);
    }
    let raw_noise = rng.gaussian_matrix(spec.m, spec.n);
    let raw_norm = raw_noise.frobenius_norm();
    if raw_norm == 0.0 {
        return Err(HarnessError::Numerical("noise draw was identically zero".into()));
    }
    // Exact scaling: ||noise||_F = spec.noise * ||signal||_F.
    let scale = spec.noise * signal.frobenius_norm() / raw_norm;
    Ok(&signal + &raw_noise.scale(scale))
}
