//! Small dense linear algebra used by the regression fits and the simplex.
//! Matrices are row-major `Vec<f64>`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Solves `A x = b` for symmetric positive definite `A` (n x n) by Cholesky.
pub(crate) fn solve_spd(a: &[f64], b: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    let scale = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max).max(1e-300);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 1e-13 * scale {
                    return Err(Error::Singular);
                }
                l[i * n + i] = libm::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut x = b.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[i * n + k] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    Ok(x)
}

/// LU factorization with partial pivoting of a square matrix.
#[derive(Debug, Clone)]
pub(crate) struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Returns `None` when a pivot falls below `tol` in absolute value.
    pub(crate) fn factor(mut a: Vec<f64>, n: usize, tol: f64) -> Option<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (piv, max) = (col..n)
                .map(|r| (r, a[r * n + col].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if max <= tol {
                return None;
            }
            if piv != col {
                for c in 0..n {
                    a.swap(piv * n + c, col * n + c);
                }
                perm.swap(piv, col);
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                a[r * n + col] = f;
                if f != 0.0 {
                    for c in col + 1..n {
                        a[r * n + c] -= f * a[col * n + c];
                    }
                }
            }
        }
        Some(Self { n, lu: a, perm })
    }

    /// Solves `A x = b` in place.
    pub(crate) fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        let pb: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        b.copy_from_slice(&pb);
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.lu[i * n + k] * b[k];
            }
            b[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.lu[i * n + k] * b[k];
            }
            b[i] = s / self.lu[i * n + i];
        }
    }

    /// Solves `A^T x = b` in place.
    pub(crate) fn solve_transpose(&self, b: &mut [f64]) {
        let n = self.n;
        // A = P^T L U, so A^T x = b  <=>  U^T L^T P x = b.
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.lu[k * n + i] * b[k];
            }
            b[i] = s / self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.lu[k * n + i] * b[k];
            }
            b[i] = s;
        }
        let mut out = vec![0.0; n];
        for (i, &pi) in self.perm.iter().enumerate() {
            out[pi] = b[i];
        }
        b.copy_from_slice(&out);
    }
}

/// Indices of a maximal set of linearly independent columns of the
/// row-major `rows x cols` matrix, scanning left to right (modified
/// Gram-Schmidt with a relative tolerance).
pub(crate) fn independent_columns(x: &[f64], rows: usize, cols: usize, tol: f64) -> Vec<usize> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut keep = Vec::new();
    for j in 0..cols {
        let mut v: Vec<f64> = (0..rows).map(|i| x[i * cols + j]).collect();
        let norm0 = libm::sqrt(v.iter().map(|a| a * a).sum::<f64>());
        if norm0 == 0.0 {
            continue;
        }
        for q in &basis {
            let d: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= d * qi;
            }
        }
        let norm = libm::sqrt(v.iter().map(|a| a * a).sum::<f64>());
        if norm > tol * norm0 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            basis.push(v);
            keep.push(j);
        }
    }
    keep
}

/// Ordinary least squares by Householder QR. `x` is row-major `rows x cols`.
pub(crate) fn least_squares(x: &[f64], y: &[f64], rows: usize, cols: usize) -> Result<Vec<f64>> {
    if rows < cols {
        return Err(Error::Degenerate("fewer rows than coefficients".into()));
    }
    // Columns are equilibrated to unit norm so the rank test below does not
    // depend on their units.
    let mut col_norm = vec![0.0; cols];
    for (j, cn) in col_norm.iter_mut().enumerate() {
        let nrm = libm::sqrt((0..rows).map(|i| x[i * cols + j] * x[i * cols + j]).sum::<f64>());
        *cn = if nrm > 0.0 { nrm } else { 1.0 };
    }
    let mut a: Vec<f64> = x.iter().enumerate().map(|(idx, v)| v / col_norm[idx % cols]).collect();
    let mut b = y.to_vec();
    let mut diag = vec![0.0; cols];
    for k in 0..cols {
        let norm = libm::sqrt((k..rows).map(|i| a[i * cols + k] * a[i * cols + k]).sum::<f64>());
        if norm == 0.0 {
            return Err(Error::Singular);
        }
        let alpha = if a[k * cols + k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..rows).map(|i| a[i * cols + k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        diag[k] = alpha;
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k + 1..cols {
            let d: f64 = (k..rows).map(|i| v[i - k] * a[i * cols + j]).sum();
            let f = 2.0 * d / vnorm2;
            for i in k..rows {
                a[i * cols + j] -= f * v[i - k];
            }
        }
        let d: f64 = (k..rows).map(|i| v[i - k] * b[i]).sum();
        let f = 2.0 * d / vnorm2;
        for i in k..rows {
            b[i] -= f * v[i - k];
        }
    }
    let scale = diag.iter().map(|d| d.abs()).fold(0.0, f64::max);
    let mut coef = vec![0.0; cols];
    for k in (0..cols).rev() {
        if diag[k].abs() <= 1e-12 * scale {
            return Err(Error::Singular);
        }
        let mut s = b[k];
        for j in k + 1..cols {
            s -= a[k * cols + j] * coef[j];
        }
        coef[k] = s / diag[k];
    }
    for (c, n) in coef.iter_mut().zip(&col_norm) {
        *c /= n;
    }
    Ok(coef)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spd_solve() {
        let a = [4.0, 2.0, 2.0, 3.0];
        let x = solve_spd(&a, &[2.0, 1.0], 2).unwrap();
        assert!((4.0 * x[0] + 2.0 * x[1] - 2.0).abs() < 1e-12);
        assert!((2.0 * x[0] + 3.0 * x[1] - 1.0).abs() < 1e-12);
        assert_eq!(solve_spd(&[1.0, 1.0, 1.0, 1.0], &[1.0, 1.0], 2), Err(Error::Singular));
    }

    #[test]
    fn lu_and_transpose() {
        let a = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let lu = Lu::factor(a.clone(), 3, 1e-14).unwrap();
        let mut b = [1.0, 2.0, 3.0];
        lu.solve(&mut b);
        for r in 0..3 {
            let s: f64 = (0..3).map(|c| a[r * 3 + c] * b[c]).sum();
            assert!((s - [1.0, 2.0, 3.0][r]).abs() < 1e-12);
        }
        let mut b = [1.0, 2.0, 3.0];
        lu.solve_transpose(&mut b);
        for c in 0..3 {
            let s: f64 = (0..3).map(|r| a[r * 3 + c] * b[r]).sum();
            assert!((s - [1.0, 2.0, 3.0][c]).abs() < 1e-12);
        }
    }

    #[test]
    fn detects_dependent_columns() {
        // columns: 1, t, 1 (duplicate), 2t
        let rows = 4;
        let mut x = Vec::new();
        for t in 0..rows {
            let t = t as f64;
            x.extend_from_slice(&[1.0, t, 1.0, 2.0 * t]);
        }
        assert_eq!(independent_columns(&x, rows, 4, 1e-9), vec![0, 1]);
    }

    #[test]
    fn ols_recovers_line() {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for t in 0..10 {
            let t = t as f64;
            x.extend_from_slice(&[1.0, t]);
            y.push(3.0 - 0.5 * t);
        }
        let c = least_squares(&x, &y, 10, 2).unwrap();
        assert!((c[0] - 3.0).abs() < 1e-12 && (c[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn ols_with_badly_scaled_column() {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for t in 0..20 {
            let v = 1e13 * (1.0 + (t * t % 7) as f64);
            x.extend_from_slice(&[1.0, v]);
            y.push(2.0 + 0.25 * v);
        }
        let c = least_squares(&x, &y, 20, 2).unwrap();
        assert!((c[1] - 0.25).abs() < 1e-12);
        // Next to 1e13-sized regressors the intercept is only known to ~1e-3.
        assert!((c[0] - 2.0).abs() < 0.1, "{c:?}");
    }
}
