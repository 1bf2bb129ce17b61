//! Dense complex matrix helpers for cooperation-frame-sized problems.
//!
//! Frames are at most a dozen slots long, so everything here is a plain
//! row-major `Vec<Complex64>` with straightforward O(n^3) routines. The
//! row-vector convention of the channel model (`y = z * M`) is kept
//! throughout the crate.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { pivot: f64, index: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    nrows: usize,
    ncols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CMat {
            nrows,
            ncols,
            data: vec![Complex64::new(0.0, 0.0); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols));
        CMat {
            nrows,
            ncols,
            data: rows.concat(),
        }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let cx: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        CMat::from_rows(&cx)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.ncols, rhs.nrows, "inner dimensions must agree");
        let mut out = CMat::zeros(self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.ncols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> CMat {
        let mut out = CMat::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Row-vector product `z * self` (the transmit-side convention).
    pub fn left_mul_vec(&self, z: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(z.len(), self.nrows, "vector length must match row count");
        let mut out = vec![Complex64::new(0.0, 0.0); self.ncols];
        for (k, &zk) in z.iter().enumerate() {
            if zk == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..self.ncols {
                out[j] += zk * self[(k, j)];
            }
        }
        out
    }

    pub fn frobenius_distance(&self, other: &CMat) -> f64 {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: f64) -> CMat {
        CMat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn is_upper_triangular(&self, tol: f64) -> bool {
        for i in 0..self.nrows {
            for j in 0..i.min(self.ncols) {
                if self[(i, j)].norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.ncols + j]
    }
}

/// Cholesky factor `L` (lower triangular) of a Hermitian positive-definite
/// matrix, `a = L * L^H`.
pub fn cholesky_lower(a: &CMat) -> Result<CMat, LinalgError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(LinalgError::DimensionMismatch("cholesky needs a square matrix".into()));
    }
    let mut l = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)].conj();
            }
            if i == j {
                let pivot = sum.re;
                if pivot <= 0.0 || sum.im.abs() > 1e-9 * pivot.abs().max(1.0) {
                    return Err(LinalgError::NotPositiveDefinite { pivot, index: i });
                }
                l[(i, j)] = Complex64::new(pivot.sqrt(), 0.0);
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix by forward substitution.
pub fn invert_lower_triangular(l: &CMat) -> CMat {
    let n = l.nrows();
    let mut inv = CMat::zeros(n, n);
    for col in 0..n {
        for i in col..n {
            let mut v = if i == col {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            for k in col..i {
                v -= l[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = v / l[(i, i)];
        }
    }
    inv
}

/// `ln det(a)` for Hermitian positive-definite `a`, via Cholesky.
pub fn logdet_hermitian_pd(a: &CMat) -> Result<f64, LinalgError> {
    let l = cholesky_lower(a)?;
    Ok(2.0 * (0..a.nrows()).map(|i| l[(i, i)].re.ln()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cholesky_recovers_matrix() {
        // Hermitian PD built as B * B^H + I
        let b = CMat::from_rows(&[
            vec![c(1.0, 0.5), c(-0.3, 0.2), c(0.1, -0.7)],
            vec![c(0.0, 1.1), c(2.0, 0.0), c(0.4, 0.4)],
            vec![c(-0.5, 0.0), c(0.3, -0.9), c(1.5, 0.0)],
        ]);
        let mut a = b.mul(&b.hermitian());
        for i in 0..3 {
            a[(i, i)] += c(1.0, 0.0);
        }
        let l = cholesky_lower(&a).unwrap();
        let back = l.mul(&l.hermitian());
        assert!(a.frobenius_distance(&back) < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = CMat::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(matches!(cholesky_lower(&a), Err(LinalgError::NotPositiveDefinite { .. })));
    }

    #[test]
    fn triangular_inverse() {
        let l = CMat::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, -1.0), c(3.0, 0.0)],
        ]);
        let inv = invert_lower_triangular(&l);
        let prod = l.mul(&inv);
        assert!(prod.frobenius_distance(&CMat::identity(2)) < 1e-14);
    }

    #[test]
    fn logdet_diagonal() {
        let a = CMat::from_real_rows(&[vec![2.0, 0.0], vec![0.0, 8.0]]);
        assert!((logdet_hermitian_pd(&a).unwrap() - 16f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn row_vector_product() {
        let m = CMat::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let y = m.left_mul_vec(&[c(1.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(y, vec![c(1.0, 3.0), c(2.0, 4.0)]);
    }
}
