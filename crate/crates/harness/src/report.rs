//! Benchmark report structures and serialization.
//!
//! A report is a list of grid-cell rows (one per algorithm × rank × budget
//! combination that actually ran) plus a list of skipped cells with reasons.
//! Reports serialize to CSV (rows only; skips go to stderr when running the
//! CLI) or JSON (rows and skips). All floating-point fields are written with
//! 17 significant digits so that re-parsing reproduces the exact values.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Exact header line of the CSV report format.
pub const CSV_HEADER: &str = "algorithm,k,alpha,realized_c,realized_r,ratio_mean,ratio_std,\
                              time_mean_seconds,time_std_seconds,trials,errors";

/// Aggregated results for one benchmark grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    /// Algorithm label (`fast_cur` or `subspace`).
    pub algorithm: String,
    /// Target rank.
    pub k: usize,
    /// Budget multiplier: the cell draws about `alpha * k` columns and
    /// `alpha^2 * k` rows.
    pub alpha: f64,
    /// Mean number of distinct columns actually kept across trials.
    pub realized_c: f64,
    /// Mean number of distinct rows actually kept across trials.
    pub realized_r: f64,
    /// Mean of `||A - CUR||_F / ||A - A_k||_F` over successful trials.
    pub ratio_mean: f64,
    /// Sample standard deviation of the ratio (0 for a single trial).
    pub ratio_std: f64,
    /// Mean wall-clock seconds per decomposition (the decomposition call
    /// only; matrix generation and error evaluation are excluded).
    pub time_mean_seconds: f64,
    /// Sample standard deviation of the wall-clock seconds.
    pub time_std_seconds: f64,
    /// Number of trials attempted.
    pub trials: usize,
    /// Number of trials that failed and were excluded from the means.
    pub errors: usize,
}

/// A grid cell that was not run, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedCell {
    pub algorithm: String,
    pub k: usize,
    pub alpha: f64,
    pub reason: String,
}

/// Complete output of one benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub skipped: Vec<SkippedCell>,
}

/// Output encodings for a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Mean of a sample (0 for an empty one).
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Sample standard deviation with the n-1 denominator (0 for n <= 1).
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() <= 1 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Render a report in the requested format. An empty report (no rows) is an
/// error: it means the whole grid was skipped and there is nothing to write.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat) -> Result<String> {
    if report.rows.is_empty() {
        let mut msg = String::from("benchmark produced no rows: every grid cell was skipped");
        if let Some(first) = report.skipped.first() {
            let _ = write!(
                msg,
                " (first skip: {} k={} alpha={}: {})",
                first.algorithm, first.k, first.alpha, first.reason
            );
        }
        return Err(HarnessError::Usage(msg));
    }
    match format {
        ReportFormat::Csv => Ok(emit_csv(report)),
        ReportFormat::Json => emit_json(report),
    }
}

fn emit_csv(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            row.algorithm,
            row.k,
            row.alpha,
            row.realized_c,
            row.realized_r,
            row.ratio_mean,
            row.ratio_std,
            row.time_mean_seconds,
            row.time_std_seconds,
            row.trials,
            row.errors
        );
    }
    out
}

/// JSON serializer that writes every float with 17 significant digits, so
/// values survive a parse round trip bitwise.
struct SciFloatFormatter;

impl serde_json::ser::Formatter for SciFloatFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

fn emit_json(report: &ExperimentReport) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFloatFormatter);
    report
        .serialize(&mut ser)
        .map_err(|e| HarnessError::Input(format!("report serialization failed: {e}")))?;
    String::from_utf8(buf)
        .map_err(|e| HarnessError::Input(format!("report serialization produced bad UTF-8: {e}")))
}

/// Parse a CSV report produced by [`emit_report`].
pub fn parse_csv_report(text: &str) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines
        .next()
        .ok_or_else(|| HarnessError::Input("empty report".into()))?;
    if header.trim() != CSV_HEADER {
        return Err(HarnessError::Input(format!(
            "line 1: unexpected report header {header:?}"
        )));
    }
    let mut rows = Vec::new();
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(HarnessError::Input(format!(
                "line {line_no}: expected 11 fields, found {}",
                fields.len()
            )));
        }
        let parse_f = |idx: usize| -> Result<f64> {
            fields[idx].trim().parse().map_err(|_| {
                HarnessError::Input(format!(
                    "line {line_no}: field {} is not a number: {:?}",
                    idx + 1,
                    fields[idx]
                ))
            })
        };
        let parse_u = |idx: usize| -> Result<usize> {
            fields[idx].trim().parse().map_err(|_| {
                HarnessError::Input(format!(
                    "line {line_no}: field {} is not a count: {:?}",
                    idx + 1,
                    fields[idx]
                ))
            })
        };
        rows.push(ReportRow {
            algorithm: fields[0].trim().to_string(),
            k: parse_u(1)?,
            alpha: parse_f(2)?,
            realized_c: parse_f(3)?,
            realized_r: parse_f(4)?,
            ratio_mean: parse_f(5)?,
            ratio_std: parse_f(6)?,
            time_mean_seconds: parse_f(7)?,
            time_std_seconds: parse_f(8)?,
            trials: parse_u(9)?,
            errors: parse_u(10)?,
        });
    }
    Ok(rows)
}

/// Parse a JSON report produced by [`emit_report`].
pub fn parse_json_report(text: &str) -> Result<ExperimentReport> {
    serde_json::from_str(text).map_err(|e| HarnessError::Input(format!("bad report JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> ExperimentReport {
        ExperimentReport {
            rows: vec![
                ReportRow {
                    algorithm: "fast_cur".into(),
                    k: 10,
                    alpha: 2.0,
                    realized_c: 19.5,
                    realized_r: 38.25,
                    ratio_mean: 1.234567890123456789,
                    ratio_std: 0.05,
                    time_mean_seconds: 0.01,
                    time_std_seconds: 0.001,
                    trials: 20,
                    errors: 0,
                },
                ReportRow {
                    algorithm: "subspace".into(),
                    k: 10,
                    alpha: 2.0,
                    realized_c: 20.0,
                    realized_r: 40.0,
                    ratio_mean: std::f64::consts::PI,
                    ratio_std: 0.0,
                    time_mean_seconds: 0.2,
                    time_std_seconds: 0.0,
                    trials: 1,
                    errors: 0,
                },
            ],
            skipped: vec![SkippedCell {
                algorithm: "fast_cur".into(),
                k: 50,
                alpha: 10.0,
                reason: "row budget 5000 exceeds 1000 rows".into(),
            }],
        }
    }

    #[test]
    fn csv_round_trip_is_bitwise() {
        let report = sample_report();
        let text = emit_report(&report, ReportFormat::Csv).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        let rows = parse_csv_report(&text).unwrap();
        assert_eq!(rows, report.rows);
        assert_eq!(rows[1].ratio_mean.to_bits(), std::f64::consts::PI.to_bits());
    }

    #[test]
    fn json_round_trip_is_bitwise() {
        let report = sample_report();
        let text = emit_report(&report, ReportFormat::Json).unwrap();
        let back = parse_json_report(&text).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn empty_report_is_an_error() {
        let report = ExperimentReport {
            rows: vec![],
            skipped: vec![SkippedCell {
                algorithm: "fast_cur".into(),
                k: 3,
                alpha: 100.0,
                reason: "budget too large".into(),
            }],
        };
        let err = emit_report(&report, ReportFormat::Csv).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("budget too large"));
    }

    #[test]
    fn csv_rejects_wrong_header_and_bad_fields() {
        assert!(parse_csv_report("algorithm,k\nx,1\n").is_err());
        let good = emit_report(&sample_report(), ReportFormat::Csv).unwrap();
        let corrupted = good.replace("subspace", "subspace,extra");
        assert!(parse_csv_report(&corrupted).is_err());
    }

    #[test]
    fn statistics_match_hand_values() {
        assert_eq!(mean(&[]), 0.0);
        assert_eq!(mean(&[2.0, 4.0]), 3.0);
        assert_eq!(sample_std(&[5.0]), 0.0);
        // Sample std of {1, 3}: sqrt(((1-2)^2 + (3-2)^2) / 1) = sqrt(2).
        assert!((sample_std(&[1.0, 3.0]) - 2.0_f64.sqrt()).abs() < 1e-15);
    }
}
