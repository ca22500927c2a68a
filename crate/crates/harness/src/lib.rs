//! Benchmark harness for the `fastcur` CUR decomposition toolkit.
//!
//! This crate wraps the core library with everything needed to run it from
//! the command line and to compare algorithms reproducibly:
//!
//! * [`io`] — matrix file formats (Matrix Market, CSV, raw binary);
//! * [`synth`] — seeded synthetic matrices with controlled spectra;
//! * [`experiment`] — the benchmark grid runner;
//! * [`report`] — aggregated result rows and their CSV/JSON encodings;
//! * [`error`] — error classes mapped to process exit codes.
//!
//! The `fastcur` binary in this package exposes `decompose`, `bench`, and
//! `synth` subcommands on top of these modules.

pub mod error;
pub mod experiment;
pub mod io;
pub mod report;
pub mod synth;

pub use error::{HarnessError, Result};
pub use experiment::{
    fast_cur_cell_params, run_experiment, Algorithm, ExperimentConfig, MatrixSource,
};
pub use io::{load_matrix, save_matrix, MatrixFormat};
pub use report::{
    emit_report, parse_csv_report, parse_json_report, ExperimentReport, ReportFormat, ReportRow,
    SkippedCell, CSV_HEADER,
};
pub use synth::{generate, DecayLaw, SyntheticSpec};
