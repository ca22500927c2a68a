//! `fastcur` — command-line front end for the CUR decomposition toolkit.
//!
//! Subcommands:
//!
//! * `decompose` — factor one matrix and write the result as JSON;
//! * `bench` — sweep a (rank, budget, algorithm) grid and write a report;
//! * `synth` — generate a synthetic test matrix file.
//!
//! Exit codes: 0 on success, 2 for usage/configuration errors, 3 for
//! unreadable or malformed input files, 4 for numerical failures.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use fastcur::{fast_cur_with_params, subspace_sampling_cur, RngState};
use harness::error::{HarnessError, Result};
use harness::experiment::{
    fast_cur_cell_params, run_experiment, Algorithm, ExperimentConfig, MatrixSource,
};
use harness::io::{save_matrix, MatrixFormat};
use harness::report::{emit_report, ReportFormat};
use harness::synth::SyntheticSpec;

#[derive(Parser)]
#[command(
    name = "fastcur",
    version,
    about = "Randomized CUR matrix decomposition toolkit",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose one matrix and print the factors as JSON.
    Decompose(DecomposeArgs),
    /// Run a benchmark grid and write a CSV or JSON report.
    Bench(BenchArgs),
    /// Generate a synthetic matrix and save it to a file.
    Synth(SynthArgs),
}

/// Flags choosing the matrix to operate on: a file or a synthetic recipe.
#[derive(Args)]
struct SourceArgs {
    /// Input matrix file.
    #[arg(long, conflicts_with = "synth")]
    input: Option<PathBuf>,

    /// Format of the input file.
    #[arg(long, value_enum, default_value = "csv")]
    format: MatrixFormat,

    /// Synthetic matrix spec: m,n,rank,<power|exp>,<param>,<noise>
    /// (e.g. 1000,400,60,power,1.0,0.05); generated with the run seed.
    #[arg(long)]
    synth: Option<String>,
}

impl SourceArgs {
    fn resolve(&self, seed: u64) -> Result<MatrixSource> {
        match (&self.input, &self.synth) {
            (Some(path), None) => Ok(MatrixSource::File {
                path: path.clone(),
                format: self.format,
            }),
            (None, Some(spec)) => Ok(MatrixSource::Synthetic(SyntheticSpec::parse_cli(
                spec, seed,
            )?)),
            (Some(_), Some(_)) => Err(HarnessError::Usage(
                "--input and --synth are mutually exclusive".into(),
            )),
            (None, None) => Err(HarnessError::Usage(
                "provide a matrix with --input FILE or --synth SPEC".into(),
            )),
        }
    }
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    source: SourceArgs,

    /// Target rank.
    #[arg(long)]
    k: usize,

    /// Budget multiplier: keep about alpha*k columns and alpha^2*k rows.
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,

    /// Algorithm to run.
    #[arg(long, default_value = "fast_cur", value_parser = parse_algorithm)]
    algo: Algorithm,

    /// Random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output file for the decomposition JSON (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON experiment config file; replaces the inline matrix/grid flags.
    #[arg(
        long,
        conflicts_with_all = ["input", "format", "synth", "k", "alpha", "trials", "seed", "algos", "jobs"]
    )]
    config: Option<PathBuf>,

    #[command(flatten)]
    source: SourceArgs,

    /// Target ranks, comma-separated (e.g. 10,20,50).
    #[arg(long = "k", value_delimiter = ',', required_unless_present = "config")]
    k: Vec<usize>,

    /// Budget multipliers, comma-separated (e.g. 2,3,4).
    #[arg(long = "alpha", value_delimiter = ',', required_unless_present = "config")]
    alpha: Vec<f64>,

    /// Seeded trials per grid cell.
    #[arg(long, default_value_t = 20)]
    trials: usize,

    /// Base seed for matrix generation and trial derivation.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Algorithms to benchmark, comma-separated.
    #[arg(long = "algos", value_delimiter = ',', value_parser = parse_algorithm,
          default_values_t = [Algorithm::FastCur, Algorithm::Subspace])]
    algos: Vec<Algorithm>,

    /// Worker threads for trials within a cell.
    #[arg(long, default_value_t = 1)]
    jobs: usize,

    /// Output file for the report (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Report encoding.
    #[arg(long = "out-format", value_enum, default_value = "csv")]
    out_format: ReportFormat,
}

#[derive(Args)]
struct SynthArgs {
    /// Synthetic matrix spec: m,n,rank,<power|exp>,<param>,<noise>.
    #[arg(long)]
    synth: String,

    /// Generation seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output matrix file.
    #[arg(long)]
    out: PathBuf,

    /// Format of the output file.
    #[arg(long, value_enum, default_value = "csv")]
    format: MatrixFormat,
}

fn parse_algorithm(s: &str) -> Result<Algorithm> {
    s.parse()
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_decompose(args: &DecomposeArgs) -> Result<()> {
    let source = args.source.resolve(args.seed)?;
    let a = source.materialize()?;
    let (m, n) = a.shape();
    let mut rng = RngState::new(args.seed);

    let start = Instant::now();
    let decomposition = match args.algo {
        Algorithm::FastCur => {
            let params = fast_cur_cell_params(args.k, args.alpha)?;
            fast_cur_with_params(&a, &params, &mut rng)?
        }
        Algorithm::Subspace => {
            let c_tot = (args.alpha * args.k as f64).round() as usize;
            let r_tot = (args.alpha * c_tot as f64).round() as usize;
            subspace_sampling_cur(&a, args.k, c_tot, r_tot, &mut rng)?
        }
    };
    let seconds = start.elapsed().as_secs_f64();

    let err = fastcur::reconstruction_error(&a, &decomposition)?;
    let (realized_c, realized_r) = decomposition.realized_counts();
    eprintln!(
        "{}: {m}x{n} matrix, kept {realized_c} columns and {realized_r} rows \
         in {seconds:.3}s; relative Frobenius error {:.3e}",
        args.algo.label(),
        err / a.frobenius_norm()
    );

    let json = decomposition.to_json()?;
    write_or_print(&args.out, &json)?;
    if args.out.is_none() {
        println!();
    }
    Ok(())
}

fn run_bench(args: &BenchArgs) -> Result<()> {
    let config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig {
            matrix: args.source.resolve(args.seed)?,
            ks: args.k.clone(),
            alphas: args.alpha.clone(),
            trials: args.trials,
            seed: args.seed,
            algorithms: args.algos.clone(),
            jobs: args.jobs,
        },
    };

    let report = run_experiment(&config)?;
    for cell in &report.skipped {
        eprintln!(
            "skipped {} k={} alpha={}: {}",
            cell.algorithm, cell.k, cell.alpha, cell.reason
        );
    }
    let text = emit_report(&report, args.out_format)?;
    write_or_print(&args.out, &text)?;
    if args.out.is_none() && args.out_format == ReportFormat::Json {
        println!();
    }
    Ok(())
}

fn run_synth(args: &SynthArgs) -> Result<()> {
    let spec = SyntheticSpec::parse_cli(&args.synth, args.seed)?;
    let a = harness::synth::generate(&spec)?;
    save_matrix(&args.out, &a, args.format)?;
    eprintln!(
        "wrote {}x{} synthetic matrix to {}",
        a.nrows(),
        a.ncols(),
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Decompose(args) => run_decompose(args),
        Command::Bench(args) => run_bench(args),
        Command::Synth(args) => run_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
