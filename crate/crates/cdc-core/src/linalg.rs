//! Minimal dense routines for the canonical-correlation step: a cyclic Jacobi
//! eigensolver for small symmetric matrices and the whitening it supports.
//! Matrices are row-major `Vec<f64>`; sizes stay around the feature count
//! (~20), so simplicity beats sophistication here.

#[cfg(not(feature = "std"))]
use crate::float::FloatExt;
use alloc::vec;
use alloc::vec::Vec;

/// Eigendecomposition of a symmetric k x k matrix by cyclic Jacobi rotations.
/// Returns (eigenvalues, eigenvectors as columns), unordered.
pub(crate) fn symmetric_eigen(matrix: &[f64], k: usize) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(matrix.len(), k * k);
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; k * k];
    for i in 0..k {
        v[i * k + i] = 1.0;
    }

    let off_diagonal_norm = |a: &[f64]| {
        let mut s = 0.0;
        for p in 0..k {
            for q in (p + 1)..k {
                s += a[p * k + q] * a[p * k + q];
            }
        }
        s
    };

    let scale: f64 = (0..k).map(|i| a[i * k + i].abs()).fold(1e-300, f64::max);
    let tol = 1e-30 * scale * scale;
    for _sweep in 0..60 {
        if off_diagonal_norm(&a) <= tol {
            break;
        }
        for p in 0..k {
            for q in (p + 1)..k {
                let apq = a[p * k + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * k + p];
                let aqq = a[q * k + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..k {
                    let aip = a[i * k + p];
                    let aiq = a[i * k + q];
                    a[i * k + p] = c * aip - s * aiq;
                    a[i * k + q] = s * aip + c * aiq;
                }
                for j in 0..k {
                    let apj = a[p * k + j];
                    let aqj = a[q * k + j];
                    a[p * k + j] = c * apj - s * aqj;
                    a[q * k + j] = s * apj + c * aqj;
                }
                for i in 0..k {
                    let vip = v[i * k + p];
                    let viq = v[i * k + q];
                    v[i * k + p] = c * vip - s * viq;
                    v[i * k + q] = s * vip + c * viq;
                }
            }
        }
    }

    let eigenvalues = (0..k).map(|i| a[i * k + i]).collect();
    (eigenvalues, v)
}

/// Largest singular value of an r x c matrix via the Gram matrix of the
/// smaller side.
pub(crate) fn largest_singular_value(m: &[f64], rows: usize, cols: usize) -> f64 {
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    // gram over the smaller dimension
    let (dim, gram) = if cols <= rows {
        let mut g = vec![0.0; cols * cols];
        for i in 0..cols {
            for j in i..cols {
                let mut s = 0.0;
                for r in 0..rows {
                    s += m[r * cols + i] * m[r * cols + j];
                }
                g[i * cols + j] = s;
                g[j * cols + i] = s;
            }
        }
        (cols, g)
    } else {
        let mut g = vec![0.0; rows * rows];
        for i in 0..rows {
            for j in i..rows {
                let mut s = 0.0;
                for c in 0..cols {
                    s += m[i * cols + c] * m[j * cols + c];
                }
                g[i * rows + j] = s;
                g[j * rows + i] = s;
            }
        }
        (rows, g)
    };
    let (eigenvalues, _) = symmetric_eigen(&gram, dim);
    eigenvalues
        .into_iter()
        .fold(0.0f64, f64::max)
        .max(0.0)
        .sqrt()
}
