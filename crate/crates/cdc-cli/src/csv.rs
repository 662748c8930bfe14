//! Plain CSV ingestion and emission: comma separators, '.' decimals, one
//! optional header line, no quoting.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use cdc_core::SampleMatrix;

/// Load a rectangular numeric CSV into a sample matrix. Errors name the
/// offending 1-based data row (and column for cell-level problems).
pub fn load_csv(path: &Path, has_header: bool) -> Result<SampleMatrix> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    parse_csv(&text, has_header).with_context(|| format!("in {}", path.display()))
}

pub fn parse_csv(text: &str, has_header: bool) -> Result<SampleMatrix> {
    let mut lines = text
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.is_empty());

    let header: Option<Vec<String>> = if has_header {
        match lines.next() {
            Some(line) => Some(line.split(',').map(|s| s.trim().to_string()).collect()),
            None => bail!("empty file"),
        }
    } else {
        None
    };

    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0usize;
    for (row_idx, line) in lines.enumerate() {
        let row = row_idx + 1;
        let cells: Vec<&str> = line.split(',').collect();
        match cols {
            None => cols = Some(cells.len()),
            Some(c) if c != cells.len() => {
                bail!("ragged row {row}: expected {c} columns, found {}", cells.len())
            }
            _ => {}
        }
        for (col_idx, cell) in cells.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| {
                anyhow::anyhow!("parse error at row {row}, column {}: {cell:?}", col_idx + 1)
            })?;
            if !value.is_finite() {
                bail!("non-finite value at row {row}, column {}", col_idx + 1);
            }
            values.push(value);
        }
        rows += 1;
    }
    if rows == 0 {
        bail!("empty file");
    }
    let cols = cols.unwrap();
    if let Some(names) = &header {
        if names.len() != cols {
            bail!("header has {} names but rows have {cols} columns", names.len());
        }
    }
    let matrix = SampleMatrix::new(values, rows, cols)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(match header {
        Some(names) => matrix
            .with_column_names(names)
            .map_err(|e| anyhow::anyhow!("{e}"))?,
        None => matrix,
    })
}

/// Shortest round-trip decimal rendering; byte-stable across runs.
pub fn format_f64(v: f64) -> String {
    let mut s = String::new();
    write!(s, "{v}").expect("write to string");
    s
}

pub fn write_matrix_csv(matrix: &SampleMatrix) -> String {
    let mut out = String::new();
    if let Some(names) = matrix.column_names() {
        out.push_str(&names.join(","));
        out.push('\n');
    }
    for i in 0..matrix.n_rows() {
        let row: Vec<String> = matrix.row(i).iter().map(|&v| format_f64(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Flat JSON object for the companion meta file; keys appear in call order.
pub fn meta_json(entries: &[(&str, String)]) -> String {
    let mut out = String::from("{\n");
    for (i, (key, value)) in entries.iter().enumerate() {
        let comma = if i + 1 < entries.len() { "," } else { "" };
        // numbers and booleans pass through bare; everything else is quoted
        let bare = value.parse::<f64>().is_ok() || value == "true" || value == "false";
        if bare {
            let _ = writeln!(out, "  \"{key}\": {value}{comma}");
        } else {
            let escaped = value.replace('\\', "\\\\").replace('"', "\\\"");
            let _ = writeln!(out, "  \"{key}\": \"{escaped}\"{comma}");
        }
    }
    out.push_str("}\n");
    out
}
