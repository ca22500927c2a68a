//! Benchmark experiment runner.
//!
//! An experiment is a grid over target ranks `k`, budget multipliers
//! `alpha`, and algorithms, run on one matrix for a fixed number of seeded
//! trials per cell. Each cell draws a total of about `alpha * k` columns and
//! `alpha^2 * k` rows, so the two algorithms are compared at matched nominal
//! budgets. Cells whose budgets exceed the matrix dimensions are skipped and
//! reported, not errors.
//!
//! Per-trial seeds are derived by hashing (base seed, algorithm, k, alpha,
//! trial index) together, so results are independent of cell execution order
//! and of the `jobs` setting; only the timing fields vary between runs.

use std::path::PathBuf;
use std::time::Instant;

use fastcur::{
    fast_cur_with_params, mix_seed, rank_k_tail, reconstruction_error,
    subspace_sampling_cur_with_svd, CurParams, Matrix, RngState, SvdFactors, ToleranceConfig,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::io::{load_matrix, MatrixFormat};
use crate::report::{mean, sample_std, ExperimentReport, ReportRow, SkippedCell};
use crate::synth::{generate, SyntheticSpec};

/// Where the benchmark matrix comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixSource {
    /// Load from a file on disk.
    File { path: PathBuf, format: MatrixFormat },
    /// Generate synthetically.
    Synthetic(SyntheticSpec),
}

impl MatrixSource {
    /// Produce the matrix (loading or generating as configured).
    pub fn materialize(&self) -> Result<Matrix> {
        match self {
            MatrixSource::File { path, format } => load_matrix(path, *format),
            MatrixSource::Synthetic(spec) => generate(spec),
        }
    }
}

/// Decomposition algorithms the harness can benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Sketch-based CUR with dual-set sparsification and adaptive sampling.
    FastCur,
    /// Leverage-score subspace sampling baseline (pays for a full SVD).
    Subspace,
}

impl Algorithm {
    /// Stable label used in reports and seed derivation.
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::FastCur => "fast_cur",
            Algorithm::Subspace => "subspace",
        }
    }

    fn seed_tag(self) -> u64 {
        match self {
            Algorithm::FastCur => 0,
            Algorithm::Subspace => 1,
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast_cur" => Ok(Algorithm::FastCur),
            "subspace" => Ok(Algorithm::Subspace),
            other => Err(HarnessError::Usage(format!(
                "unknown algorithm {other:?}; expected fast_cur or subspace"
            ))),
        }
    }
}

fn default_jobs() -> usize {
    1
}

/// Full description of a benchmark run. This is the schema of the JSON files
/// accepted by `fastcur bench --config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Matrix to decompose.
    pub matrix: MatrixSource,
    /// Target ranks to sweep.
    pub ks: Vec<usize>,
    /// Budget multipliers to sweep.
    pub alphas: Vec<f64>,
    /// Seeded trials per grid cell.
    pub trials: usize,
    /// Base seed; per-trial seeds are derived from it.
    pub seed: u64,
    /// Algorithms to run.
    pub algorithms: Vec<Algorithm>,
    /// Worker threads for trials within a cell (1 = sequential).
    #[serde(default = "default_jobs")]
    pub jobs: usize,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.ks.is_empty() {
            return Err(HarnessError::Usage("no target ranks given".into()));
        }
        if let Some(&k) = self.ks.iter().find(|&&k| k == 0) {
            return Err(HarnessError::Usage(format!("target rank {k} must be at least 1")));
        }
        if self.alphas.is_empty() {
            return Err(HarnessError::Usage("no budget multipliers given".into()));
        }
        if let Some(&a) = self.alphas.iter().find(|a| !(a.is_finite() && **a > 1.0)) {
            return Err(HarnessError::Usage(format!(
                "budget multiplier {a} must be a finite number greater than 1"
            )));
        }
        if self.trials == 0 {
            return Err(HarnessError::Usage("trials must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::Usage("no algorithms given".into()));
        }
        if self.jobs == 0 {
            return Err(HarnessError::Usage("jobs must be at least 1".into()));
        }
        Ok(())
    }

    /// Parse a JSON config document.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| HarnessError::Input(format!("bad experiment config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Nominal budgets for one grid cell: about `alpha * k` columns and
/// `alpha * c` rows in total.
fn nominal_budgets(k: usize, alpha: f64) -> (usize, usize) {
    let c_tot = (alpha * k as f64).round() as usize;
    let r_tot = (alpha * c_tot as f64).round() as usize;
    (c_tot, r_tot)
}

/// Split a total budget into a primary (structured) part and an adaptive
/// part for the fast algorithm: the primary stage gets half the budget but
/// never fewer than `k + 1` indices, and the adaptive stage gets the rest.
fn split_budget(k: usize, total: usize) -> Option<(usize, usize)> {
    let primary = total.div_ceil(2).max(k + 1);
    let adaptive = total.checked_sub(primary)?;
    Some((primary, adaptive))
}

/// Budget parameters for the fast algorithm at one grid cell.
///
/// The sketch accuracy is tied to the budget multiplier by `eps = 2 / alpha`
/// (capped at 1), matching the way budgets grow as `eps` shrinks in
/// [`CurParams::new`], and the sketch width parameter is `eps^(2/3)` capped
/// just below 1.
pub fn fast_cur_cell_params(k: usize, alpha: f64) -> Result<CurParams> {
    let (c_tot, r_tot) = nominal_budgets(k, alpha);
    let (c1, c2) = split_budget(k, c_tot).ok_or_else(|| {
        HarnessError::Usage(format!(
            "column budget {c_tot} cannot cover the primary stage for k={k}"
        ))
    })?;
    let (r1, r2) = split_budget(k, r_tot).ok_or_else(|| {
        HarnessError::Usage(format!(
            "row budget {r_tot} cannot cover the primary stage for k={k}"
        ))
    })?;
    let eps = (2.0 / alpha).min(1.0);
    let eps0 = eps.powf(2.0 / 3.0).min(0.99);
    Ok(CurParams::with_counts(k, eps0, c1, c2, r1, r2)?)
}

struct TrialOutcome {
    ratio: f64,
    seconds: f64,
    realized_c: usize,
    realized_r: usize,
}

struct CellPlan {
    algorithm: Algorithm,
    k: usize,
    alpha: f64,
    c_tot: usize,
    r_tot: usize,
    params: Option<CurParams>,
    tail: f64,
}

fn run_trial(
    a: &Matrix,
    plan: &CellPlan,
    svd: Option<&SvdFactors>,
    base_seed: u64,
    trial: usize,
) -> std::result::Result<TrialOutcome, fastcur::Error> {
    let seed = mix_seed(&[
        base_seed,
        plan.algorithm.seed_tag(),
        plan.k as u64,
        plan.alpha.to_bits(),
        trial as u64,
    ]);
    let mut rng = RngState::new(seed);
    let start = Instant::now();
    let decomposition = match plan.algorithm {
        Algorithm::FastCur => {
            let params = plan.params.as_ref().expect("fast cell carries params");
            fast_cur_with_params(a, params, &mut rng)?
        }
        Algorithm::Subspace => {
            let svd = svd.expect("subspace cell carries the matrix SVD");
            subspace_sampling_cur_with_svd(a, svd, plan.k, plan.c_tot, plan.r_tot, &mut rng)?
        }
    };
    let seconds = start.elapsed().as_secs_f64();
    let err = reconstruction_error(a, &decomposition)?;
    let (realized_c, realized_r) = decomposition.realized_counts();
    Ok(TrialOutcome {
        ratio: err / plan.tail,
        seconds,
        realized_c,
        realized_r,
    })
}

/// Run the full benchmark grid described by `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let a = config.matrix.materialize()?;
    let (m, n) = a.shape();
    let a_norm = a.frobenius_norm();

    // Shared across every subspace cell: the baseline's leverage scores come
    // from one exact factorization of the input.
    let svd: Option<SvdFactors> = if config.algorithms.contains(&Algorithm::Subspace) {
        Some(
            a.exact_svd(&ToleranceConfig::default())
                .map_err(|e| HarnessError::Numerical(e.to_string()))?,
        )
    } else {
        None
    };

    // Best rank-k errors, computed once per k.
    let mut tails: Vec<(usize, f64)> = Vec::with_capacity(config.ks.len());
    for &k in &config.ks {
        if k >= m.min(n) {
            tails.push((k, f64::NAN)); // cell-level skip will explain
            continue;
        }
        let tail = rank_k_tail(&a, k).map_err(|e| HarnessError::Numerical(e.to_string()))?;
        tails.push((k, tail));
    }
    let tail_for = |k: usize| tails.iter().find(|(kk, _)| *kk == k).map(|(_, t)| *t);

    let pool = if config.jobs > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.jobs)
                .build()
                .map_err(|e| HarnessError::Usage(format!("cannot build thread pool: {e}")))?,
        )
    } else {
        None
    };

    let mut rows = Vec::new();
    let mut skipped = Vec::new();

    for &k in &config.ks {
        for &alpha in &config.alphas {
            for &algorithm in &config.algorithms {
                let skip = |reason: String| SkippedCell {
                    algorithm: algorithm.label().to_string(),
                    k,
                    alpha,
                    reason,
                };

                let (c_tot, r_tot) = nominal_budgets(k, alpha);
                if k >= m.min(n) {
                    skipped.push(skip(format!(
                        "target rank {k} needs a matrix larger than {m}x{n}"
                    )));
                    continue;
                }
                if c_tot > n {
                    skipped.push(skip(format!("column budget {c_tot} exceeds {n} columns")));
                    continue;
                }
                if r_tot > m {
                    skipped.push(skip(format!("row budget {r_tot} exceeds {m} rows")));
                    continue;
                }
                let tail = tail_for(k).expect("tail cached for every k");
                if !(tail > 1e-12 * a_norm) {
                    skipped.push(skip(format!(
                        "input is numerically rank <= {k}, error ratio undefined"
                    )));
                    continue;
                }
                let params = match algorithm {
                    Algorithm::FastCur => match fast_cur_cell_params(k, alpha) {
                        Ok(p) => {
                            if let Err(e) = p.validate(m, n) {
                                skipped.push(skip(e.to_string()));
                                continue;
                            }
                            Some(p)
                        }
                        Err(e) => {
                            skipped.push(skip(e.to_string()));
                            continue;
                        }
                    },
                    Algorithm::Subspace => None,
                };

                let plan = CellPlan {
                    algorithm,
                    k,
                    alpha,
                    c_tot,
                    r_tot,
                    params,
                    tail,
                };
                let outcomes: Vec<std::result::Result<TrialOutcome, fastcur::Error>> =
                    match &pool {
                        Some(pool) => pool.install(|| {
                            (0..config.trials)
                                .into_par_iter()
                                .map(|t| run_trial(&a, &plan, svd.as_ref(), config.seed, t))
                                .collect()
                        }),
                        None => (0..config.trials)
                            .map(|t| run_trial(&a, &plan, svd.as_ref(), config.seed, t))
                            .collect(),
                    };

                let mut ratios = Vec::new();
                let mut times = Vec::new();
                let mut cs = Vec::new();
                let mut rs = Vec::new();
                let mut last_error = None;
                for outcome in outcomes {
                    match outcome {
                        Ok(t) => {
                            ratios.push(t.ratio);
                            times.push(t.seconds);
                            cs.push(t.realized_c as f64);
                            rs.push(t.realized_r as f64);
                        }
                        Err(e) => last_error = Some(e),
                    }
                }
                let errors = config.trials - ratios.len();
                if ratios.is_empty() {
                    let detail = last_error
                        .map(|e| e.to_string())
                        .unwrap_or_else(|| "no trials ran".into());
                    skipped.push(skip(format!(
                        "all {} trials failed: {detail}",
                        config.trials
                    )));
                    continue;
                }
                rows.push(ReportRow {
                    algorithm: plan.algorithm.label().to_string(),
                    k,
                    alpha,
                    realized_c: mean(&cs),
                    realized_r: mean(&rs),
                    ratio_mean: mean(&ratios),
                    ratio_std: sample_std(&ratios),
                    time_mean_seconds: mean(&times),
                    time_std_seconds: sample_std(&times),
                    trials: config.trials,
                    errors,
                });
            }
        }
    }

    Ok(ExperimentReport { rows, skipped })
}
