//! Empirical distribution functions and the copula transform.
//!
//! The copula transform evaluates the joint empirical CDF of a sample at each
//! of its own rows, producing scores in {1/n, ..., 1}. Ties are counted with
//! weak inequality throughout, so the transform is a pure function of the
//! componentwise orderings and is invariant under strictly increasing maps of
//! any coordinate.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{CdcError, Result};
use crate::matrix::SampleMatrix;

/// Joint-ECDF scores of a sample, the `W`/`V` inputs to the dependence
/// measures.
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaVector {
    values: Vec<f64>,
    source_dims: usize,
}

impl CopulaVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source_dims(&self) -> usize {
        self.source_dims
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Assemble from precomputed scores; used by callers that permute or
    /// otherwise rearrange an existing transform.
    pub fn from_parts(values: Vec<f64>, source_dims: usize) -> Self {
        CopulaVector { values, source_dims }
    }
}

/// Fraction of observations `<= query`; right-continuous step function.
pub fn ecdf_univariate(data: &[f64], query: f64) -> Result<f64> {
    if data.is_empty() {
        return Err(CdcError::EmptyInput);
    }
    let count = data.iter().filter(|&&v| v <= query).count();
    Ok(count as f64 / data.len() as f64)
}

/// Fraction of rows dominated componentwise by `query` in all coordinates.
pub fn ecdf_multivariate(data: &SampleMatrix, query: &[f64]) -> Result<f64> {
    if query.len() != data.n_cols() {
        return Err(CdcError::DimensionMismatch {
            expected: data.n_cols(),
            got: query.len(),
        });
    }
    let n = data.n_rows();
    let count = (0..n)
        .filter(|&i| dominated(data.row(i), query))
        .count();
    Ok(count as f64 / n as f64)
}

#[inline]
fn dominated(row: &[f64], query: &[f64]) -> bool {
    row.iter().zip(query).all(|(a, b)| a <= b)
}

// The naive scan is exact and cache-friendly at the paper's sample sizes;
// the sorted paths take over for large n in low dimension.
const FAST_PATH_MIN_N: usize = 5001;

/// Joint ECDF of the sample evaluated at each of its own rows.
pub fn copula_transform(data: &SampleMatrix) -> Result<CopulaVector> {
    let n = data.n_rows();
    if n < 2 {
        return Err(CdcError::DegenerateInput("copula transform needs n >= 2"));
    }
    let counts = if n >= FAST_PATH_MIN_N && data.n_cols() == 1 {
        dominance_counts_sorted_1d(&data.column(0))
    } else if n >= FAST_PATH_MIN_N && data.n_cols() == 2 {
        dominance_counts_offline_2d(&data.column(0), &data.column(1))
    } else {
        dominance_counts_naive(data)
    };
    let values = counts.iter().map(|&c| c as f64 / n as f64).collect();
    Ok(CopulaVector {
        values,
        source_dims: data.n_cols(),
    })
}

fn dominance_counts_naive(data: &SampleMatrix) -> Vec<usize> {
    let n = data.n_rows();
    (0..n)
        .map(|i| {
            let q = data.row(i);
            (0..n).filter(|&j| dominated(data.row(j), q)).count()
        })
        .collect()
}

// counts[i] = #{j : x_j <= x_i}; equal values share the count of the last
// element of their tie run. Also the rank scores seeding the ACE iteration.
pub(crate) fn dominance_counts_sorted_1d(x: &[f64]) -> Vec<usize> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).expect("finite"));
    let mut counts = vec![0usize; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        for k in i..=j {
            counts[order[k]] = j + 1;
        }
        i = j + 1;
    }
    counts
}

// Offline dominance counting: sweep in x-order, query a Fenwick tree over
// y-ranks. Tie runs in x are queried as a block so that equal-x points see
// each other, matching the weak-inequality count exactly.
fn dominance_counts_offline_2d(x: &[f64], y: &[f64]) -> Vec<usize> {
    let n = x.len();
    let y_rank = dense_ranks(y);
    let n_ranks = y_rank.iter().map(|&r| r + 1).max().unwrap_or(1);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).expect("finite"));

    let mut tree = Fenwick::new(n_ranks);
    let mut counts = vec![0usize; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let group = &order[i..=j];
        // within-group pairs: both x-coordinates tie, so y decides
        let mut group_sorted: Vec<usize> = group.to_vec();
        group_sorted.sort_by(|&a, &b| y[a].partial_cmp(&y[b]).expect("finite"));
        let mut gi = 0;
        while gi < group_sorted.len() {
            let mut gj = gi;
            while gj + 1 < group_sorted.len()
                && y[group_sorted[gj + 1]] == y[group_sorted[gi]]
            {
                gj += 1;
            }
            for &idx in &group_sorted[gi..=gj] {
                counts[idx] = gj + 1 + tree.prefix_sum(y_rank[idx]);
            }
            gi = gj + 1;
        }
        for &idx in group {
            tree.add(y_rank[idx], 1);
        }
        i = j + 1;
    }
    counts
}

fn dense_ranks(v: &[f64]) -> Vec<usize> {
    let n = v.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).expect("finite"));
    let mut ranks = vec![0usize; n];
    let mut rank = 0;
    let mut i = 0;
    while i < n {
        if i > 0 && v[order[i]] != v[order[i - 1]] {
            rank += 1;
        }
        ranks[order[i]] = rank;
        i += 1;
    }
    ranks
}

struct Fenwick {
    tree: Vec<usize>,
}

impl Fenwick {
    fn new(size: usize) -> Self {
        Fenwick {
            tree: vec![0; size + 1],
        }
    }

    fn add(&mut self, idx: usize, delta: usize) {
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    // sum of entries with index <= idx
    fn prefix_sum(&self, idx: usize) -> usize {
        let mut i = idx + 1;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}
