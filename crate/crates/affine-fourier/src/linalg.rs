//! Small dense linear algebra helpers.
//!
//! Determinants use explicit partially-pivoted elimination: the W-matrices of
//! the determinantal measures are non-symmetric, so pivoting is mandatory,
//! and every matrix in this crate is small (≤ 64) so an O(n³) sweep is fine.

use crate::Complex64;
use nalgebra::DMatrix;

/// Determinant of a real square matrix by partially pivoted elimination.
pub fn det_real(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    if n == 0 {
        return 1.0;
    }
    let mut a = m.clone();
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[(col, col)].abs();
        for row in col + 1..n {
            let v = a[(row, col)].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap_rows(pivot, col);
            det = -det;
        }
        let d = a[(col, col)];
        det *= d;
        for row in col + 1..n {
            let f = a[(row, col)] / d;
            if f != 0.0 {
                for k in col..n {
                    let v = a[(col, k)];
                    a[(row, k)] -= f * v;
                }
            }
        }
    }
    det
}

/// Determinant of a complex square matrix by partially pivoted elimination.
pub fn det_complex(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut a = m.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[(col, col)].norm_sqr();
        for row in col + 1..n {
            let v = a[(row, col)].norm_sqr();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap_rows(pivot, col);
            det = -det;
        }
        let d = a[(col, col)];
        det *= d;
        for row in col + 1..n {
            let f = a[(row, col)] / d;
            if f.norm_sqr() != 0.0 {
                for k in col..n {
                    let v = a[(col, k)];
                    a[(row, k)] -= f * v;
                }
            }
        }
    }
    det
}

/// Eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    m.clone().symmetric_eigenvalues().iter().copied().collect()
}

/// Eigenvalues of a Hermitian complex matrix (sorted ascending).
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Moduli of the eigenvalues of a general real matrix.
pub fn eigenvalue_moduli(m: &DMatrix<f64>) -> Vec<f64> {
    m.complex_eigenvalues().iter().map(|c| c.norm()).collect()
}
