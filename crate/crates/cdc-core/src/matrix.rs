use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{CdcError, Result};

/// Immutable n x d observation matrix, rows are samples.
///
/// Construction validates that every entry is finite, so downstream code can
/// rely on clean data without re-checking.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    values: Vec<f64>, // row-major
    rows: usize,
    cols: usize,
    column_names: Option<Vec<String>>,
}

impl SampleMatrix {
    /// Build from a row-major buffer of `rows * cols` finite values.
    pub fn new(values: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || values.is_empty() {
            return Err(CdcError::EmptyInput);
        }
        if values.len() != rows * cols {
            return Err(CdcError::DimensionMismatch {
                expected: rows * cols,
                got: values.len(),
            });
        }
        for (idx, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(CdcError::NonFinite {
                    row: idx / cols,
                    col: idx % cols,
                });
            }
        }
        Ok(SampleMatrix {
            values,
            rows,
            cols,
            column_names: None,
        })
    }

    /// Single-column matrix from a vector of observations.
    pub fn from_column(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        SampleMatrix::new(values, n, 1)
    }

    /// Attach column labels; the count must match the column count.
    pub fn with_column_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.cols {
            return Err(CdcError::DimensionMismatch {
                expected: self.cols,
                got: names.len(),
            });
        }
        self.column_names = Some(names);
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.values[i * self.cols + j]).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row means, the scalar reduction used by the raw-ACE baseline.
    pub fn row_means(&self) -> Vec<f64> {
        let d = self.cols as f64;
        (0..self.rows)
            .map(|i| self.row(i).iter().sum::<f64>() / d)
            .collect()
    }
}
