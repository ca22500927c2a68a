//! Matrix file input/output.
//!
//! Three on-disk formats are supported:
//!
//! * **Matrix Market** (`mm`) — the NIST text exchange format. Both the
//!   `array` layout (dense, column-major values) and the `coordinate` layout
//!   (1-based sparse triplets) are read, with `general` or `symmetric`
//!   storage. Symmetric entries are mirrored; repeated coordinate entries
//!   overwrite earlier ones. Writing always produces `array general`.
//! * **CSV** (`csv`) — one matrix row per line, comma-separated decimal
//!   values. Every row must have the same number of fields.
//! * **Raw binary** (`bin`) — a 16-byte header of two little-endian `u64`
//!   values (rows, columns) followed by `rows * cols` little-endian `f64`
//!   values in row-major order.
//!
//! All parse errors carry the offending line (or byte position) so a bad
//! file can be fixed without guessing.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use fastcur::Matrix;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// On-disk matrix encodings understood by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum MatrixFormat {
    /// Matrix Market text format (`.mtx`), array or coordinate layout.
    #[serde(rename = "mm")]
    #[value(name = "mm")]
    MatrixMarket,
    /// Comma-separated values, one matrix row per line.
    #[serde(rename = "csv")]
    Csv,
    /// Raw little-endian binary: `u64` rows, `u64` cols, then row-major `f64`s.
    #[serde(rename = "bin")]
    Bin,
}

impl FromStr for MatrixFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mm" => Ok(MatrixFormat::MatrixMarket),
            "csv" => Ok(MatrixFormat::Csv),
            "bin" => Ok(MatrixFormat::Bin),
            other => Err(HarnessError::Usage(format!(
                "unknown matrix format {other:?}; expected one of mm, csv, bin"
            ))),
        }
    }
}

/// Read a matrix from `path` in the given format.
pub fn load_matrix(path: &Path, format: MatrixFormat) -> Result<Matrix> {
    let annotate = |e: HarnessError| match e {
        HarnessError::Input(msg) => HarnessError::Input(format!("{}: {msg}", path.display())),
        other => other,
    };
    match format {
        MatrixFormat::MatrixMarket => {
            let text = fs::read_to_string(path)?;
            parse_matrix_market(&text).map_err(annotate)
        }
        MatrixFormat::Csv => {
            let text = fs::read_to_string(path)?;
            parse_csv(&text).map_err(annotate)
        }
        MatrixFormat::Bin => {
            let bytes = fs::read(path)?;
            decode_bin(&bytes).map_err(annotate)
        }
    }
}

/// Write `matrix` to `path` in the given format.
pub fn save_matrix(path: &Path, matrix: &Matrix, format: MatrixFormat) -> Result<()> {
    match format {
        MatrixFormat::MatrixMarket => fs::write(path, format_matrix_market(matrix))?,
        MatrixFormat::Csv => fs::write(path, format_csv(matrix))?,
        MatrixFormat::Bin => fs::write(path, encode_bin(matrix))?,
    }
    Ok(())
}

fn input_err(line: usize, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Input(format!("line {line}: {msg}"))
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    let value: f64 = token
        .parse()
        .map_err(|_| input_err(line, format!("expected a number, found {token:?}")))?;
    if !value.is_finite() {
        return Err(input_err(line, format!("non-finite value {token:?}")));
    }
    Ok(value)
}

fn parse_index(token: &str, line: usize, bound: usize, what: &str) -> Result<usize> {
    let idx: usize = token
        .parse()
        .map_err(|_| input_err(line, format!("expected a {what} index, found {token:?}")))?;
    if idx == 0 || idx > bound {
        return Err(input_err(
            line,
            format!("{what} index {idx} outside 1..={bound}"),
        ));
    }
    Ok(idx - 1)
}

/// Parse Matrix Market text into a dense matrix.
pub fn parse_matrix_market(text: &str) -> Result<Matrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines
        .next()
        .ok_or_else(|| input_err(1, "empty file; expected a %%MatrixMarket header"))?;
    let header_fields: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if header_fields.len() < 4 || !header_fields[0].eq_ignore_ascii_case("%%MatrixMarket") {
        return Err(input_err(
            1,
            "expected header \"%%MatrixMarket matrix <format> <field> <symmetry>\"",
        ));
    }
    if header_fields[1] != "matrix" {
        return Err(input_err(
            1,
            format!("unsupported object {:?}; only \"matrix\" is supported", header_fields[1]),
        ));
    }
    let layout = header_fields[2].as_str();
    if layout != "array" && layout != "coordinate" {
        return Err(input_err(1, format!("unsupported layout {layout:?}")));
    }
    let field = header_fields.get(3).map(String::as_str).unwrap_or("real");
    if !matches!(field, "real" | "double" | "integer") {
        return Err(input_err(
            1,
            format!("unsupported field type {field:?}; only real-valued matrices are supported"),
        ));
    }
    let symmetry = header_fields.get(4).map(String::as_str).unwrap_or("general");
    if symmetry != "general" && symmetry != "symmetric" {
        return Err(input_err(1, format!("unsupported symmetry {symmetry:?}")));
    }
    let symmetric = symmetry == "symmetric";

    // Remaining content lines, skipping comments and blanks.
    let mut content = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_line, size_text) = content
        .next()
        .ok_or_else(|| input_err(1, "missing size line after header"))?;
    let size_tokens: Vec<&str> = size_text.split_whitespace().collect();

    if layout == "array" {
        if size_tokens.len() != 2 {
            return Err(input_err(size_line, "array size line must be \"rows cols\""));
        }
        let m: usize = size_tokens[0]
            .parse()
            .map_err(|_| input_err(size_line, "invalid row count"))?;
        let n: usize = size_tokens[1]
            .parse()
            .map_err(|_| input_err(size_line, "invalid column count"))?;
        if m == 0 || n == 0 {
            return Err(input_err(size_line, "matrix dimensions must be positive"));
        }
        if symmetric && m != n {
            return Err(input_err(size_line, "symmetric matrices must be square"));
        }

        // Values arrive in column-major order; symmetric storage holds only
        // the lower triangle (including the diagonal) of each column.
        let mut data = vec![0.0; m * n];
        let mut expected = Vec::with_capacity(m * n);
        for j in 0..n {
            let start = if symmetric { j } else { 0 };
            for i in start..m {
                expected.push((i, j));
            }
        }
        let mut pos = 0;
        let mut last_line = size_line;
        for (line, text) in content {
            last_line = line;
            for token in text.split_whitespace() {
                if pos >= expected.len() {
                    return Err(input_err(line, "more values than the size line promises"));
                }
                let value = parse_value(token, line)?;
                let (i, j) = expected[pos];
                data[i * n + j] = value;
                if symmetric {
                    data[j * n + i] = value;
                }
                pos += 1;
            }
        }
        if pos < expected.len() {
            return Err(input_err(
                last_line,
                format!("expected {} values, found {pos}", expected.len()),
            ));
        }
        Matrix::from_row_major(m, n, &data).map_err(|e| HarnessError::Input(e.to_string()))
    } else {
        if size_tokens.len() != 3 {
            return Err(input_err(
                size_line,
                "coordinate size line must be \"rows cols nonzeros\"",
            ));
        }
        let m: usize = size_tokens[0]
            .parse()
            .map_err(|_| input_err(size_line, "invalid row count"))?;
        let n: usize = size_tokens[1]
            .parse()
            .map_err(|_| input_err(size_line, "invalid column count"))?;
        let nnz: usize = size_tokens[2]
            .parse()
            .map_err(|_| input_err(size_line, "invalid nonzero count"))?;
        if m == 0 || n == 0 {
            return Err(input_err(size_line, "matrix dimensions must be positive"));
        }
        if symmetric && m != n {
            return Err(input_err(size_line, "symmetric matrices must be square"));
        }

        let mut data = vec![0.0; m * n];
        let mut seen = 0usize;
        let mut last_line = size_line;
        for (line, text) in content {
            last_line = line;
            let tokens: Vec<&str> = text.split_whitespace().collect();
            if tokens.len() != 3 {
                return Err(input_err(line, "coordinate entry must be \"row col value\""));
            }
            if seen >= nnz {
                return Err(input_err(line, "more entries than the size line promises"));
            }
            let i = parse_index(tokens[0], line, m, "row")?;
            let j = parse_index(tokens[1], line, n, "column")?;
            let value = parse_value(tokens[2], line)?;
            // Duplicate entries overwrite; symmetric storage mirrors.
            data[i * n + j] = value;
            if symmetric {
                data[j * n + i] = value;
            }
            seen += 1;
        }
        if seen < nnz {
            return Err(input_err(
                last_line,
                format!("expected {nnz} entries, found {seen}"),
            ));
        }
        Matrix::from_row_major(m, n, &data).map_err(|e| HarnessError::Input(e.to_string()))
    }
}

/// Render a matrix as Matrix Market `array general` text.
pub fn format_matrix_market(matrix: &Matrix) -> String {
    let (m, n) = matrix.shape();
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{m} {n}");
    for j in 0..n {
        for i in 0..m {
            let _ = writeln!(out, "{:.16e}", matrix.get(i, j));
        }
    }
    out
}

/// Parse comma-separated text, one matrix row per line.
pub fn parse_csv(text: &str) -> Result<Matrix> {
    let mut data: Vec<f64> = Vec::new();
    let mut width: Option<(usize, usize)> = None; // (cols, line it was set on)
    let mut rows = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = 0usize;
        for token in line.split(',') {
            data.push(parse_value(token.trim(), line_no)?);
            cols += 1;
        }
        match width {
            None => width = Some((cols, line_no)),
            Some((expected, first_line)) if expected != cols => {
                return Err(input_err(
                    line_no,
                    format!("row has {cols} fields but line {first_line} has {expected}"),
                ));
            }
            Some(_) => {}
        }
        rows += 1;
    }
    let (cols, _) = width.ok_or_else(|| input_err(1, "no data rows"))?;
    Matrix::from_row_major(rows, cols, &data).map_err(|e| HarnessError::Input(e.to_string()))
}

/// Render a matrix as CSV text, one row per line.
pub fn format_csv(matrix: &Matrix) -> String {
    let (m, n) = matrix.shape();
    let mut out = String::new();
    for i in 0..m {
        for j in 0..n {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{:.16e}", matrix.get(i, j));
        }
        out.push('\n');
    }
    out
}

/// Decode the raw binary layout (16-byte header plus row-major payload).
pub fn decode_bin(bytes: &[u8]) -> Result<Matrix> {
    if bytes.len() < 16 {
        return Err(HarnessError::Input(format!(
            "binary matrix needs a 16-byte header, file has {} bytes",
            bytes.len()
        )));
    }
    let m = u64::from_le_bytes(bytes[0..8].try_into().unwrap()) as usize;
    let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    if m == 0 || n == 0 {
        return Err(HarnessError::Input(
            "binary matrix header has a zero dimension".into(),
        ));
    }
    let expected = m
        .checked_mul(n)
        .and_then(|e| e.checked_mul(8))
        .and_then(|e| e.checked_add(16))
        .ok_or_else(|| HarnessError::Input("binary matrix header dimensions overflow".into()))?;
    if bytes.len() != expected {
        return Err(HarnessError::Input(format!(
            "binary matrix of {m}x{n} values needs {expected} bytes, file has {}",
            bytes.len()
        )));
    }
    let mut data = Vec::with_capacity(m * n);
    for (idx, chunk) in bytes[16..].chunks_exact(8).enumerate() {
        let value = f64::from_le_bytes(chunk.try_into().unwrap());
        if !value.is_finite() {
            return Err(HarnessError::Input(format!(
                "non-finite value at byte offset {}",
                16 + idx * 8
            )));
        }
        data.push(value);
    }
    Matrix::from_row_major(m, n, &data).map_err(|e| HarnessError::Input(e.to_string()))
}

/// Encode a matrix in the raw binary layout.
pub fn encode_bin(matrix: &Matrix) -> Vec<u8> {
    let (m, n) = matrix.shape();
    let mut out = Vec::with_capacity(16 + m * n * 8);
    out.extend_from_slice(&(m as u64).to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    for value in matrix.to_row_major() {
        out.extend_from_slice(&value.to_le_bytes());
    }
    out
}
