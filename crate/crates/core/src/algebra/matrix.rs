//! Small dense complex matrices.
//!
//! Sizes in this crate rarely exceed 12x12, so everything is stored row-major
//! in a flat `Vec` and the decompositions are the textbook ones: LU with
//! partial pivoting for determinants, Householder QR for the real lattice
//! models, and one-sided Jacobi for singular values.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default relative threshold for numeric rank decisions.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Dimension("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_vec(rows.len(), cols, rows.concat())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn row_vector(values: &[C64]) -> Self {
        Self {
            rows: 1,
            cols: values.len(),
            data: values.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn hermitian_transpose(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> ComplexMatrix {
        self.scale(C64::new(s, 0.0))
    }

    /// `self += s * other`, shapes must agree.
    pub fn add_scaled(&mut self, other: &ComplexMatrix, s: C64) {
        debug_assert_eq!(self.shape(), other.shape());
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Stacks matrices vertically; all must share the column count.
    pub fn vstack(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::Dimension("vstack column mismatch".into()));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let data = blocks.iter().flat_map(|b| b.data.iter().copied()).collect();
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Concatenates matrices horizontally; all must share the row count.
    pub fn hstack(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::Dimension("hstack row mismatch".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = ComplexMatrix::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            for i in 0..rows {
                for j in 0..b.cols {
                    out[(i, offset + j)] = b[(i, j)];
                }
            }
            offset += b.cols;
        }
        Ok(out)
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn det(&self) -> Result<C64> {
        if self.rows != self.cols {
            return Err(Error::Dimension(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = C64::new(1.0, 0.0);
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))
                .unwrap_or(k);
            let p = a[pivot * n + k];
            if p.norm() == 0.0 {
                return Ok(C64::new(0.0, 0.0));
            }
            if pivot != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot * n + j);
                }
                det = -det;
            }
            det *= p;
            for i in k + 1..n {
                let f = a[i * n + k] / p;
                for j in k..n {
                    let v = a[k * n + j];
                    a[i * n + j] -= f * v;
                }
            }
        }
        Ok(det)
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let (m, n) = self.shape();
        if m == 0 || n == 0 {
            return Vec::new();
        }
        // Column-major copy of A (m >= n) or A^H (m < n).
        let (rows, cols, mut buf) = if m >= n {
            let mut buf = Vec::with_capacity(m * n);
            for j in 0..n {
                buf.extend((0..m).map(|i| self[(i, j)]));
            }
            (m, n, buf)
        } else {
            let mut buf = Vec::with_capacity(m * n);
            for i in 0..m {
                buf.extend((0..n).map(|j| self[(i, j)].conj()));
            }
            (n, m, buf)
        };
        let mut out = vec![0.0; cols];
        jacobi_singular_values(&mut buf, rows, cols, &mut out);
        out
    }

    /// Numeric rank: singular values above `tol * sigma_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let sv = self.singular_values();
        rank_from_singular_values(&sv, tol)
    }

    /// Smallest of the `min(rows, cols)` singular values.
    pub fn min_singular_value(&self) -> f64 {
        self.singular_values().last().copied().unwrap_or(0.0)
    }
}

/// Counts singular values above `tol * max`. Input need not be sorted.
pub fn rank_from_singular_values(sv: &[f64], tol: f64) -> usize {
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// One-sided (Hestenes) Jacobi on a column-major `rows x cols` buffer with
/// `rows >= cols`. On return `out` holds the singular values, sorted
/// descending; `cols_buf` is overwritten.
pub fn jacobi_singular_values(cols_buf: &mut [C64], rows: usize, cols: usize, out: &mut [f64]) {
    debug_assert!(rows >= cols);
    debug_assert_eq!(cols_buf.len(), rows * cols);
    const EPS: f64 = 1e-15;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, C64::new(0.0, 0.0));
                {
                    let cp = &cols_buf[p * rows..(p + 1) * rows];
                    let cq = &cols_buf[q * rows..(q + 1) * rows];
                    for (a, b) in cp.iter().zip(cq) {
                        alpha += a.norm_sqr();
                        beta += b.norm_sqr();
                        gamma += a.conj() * b;
                    }
                }
                let g = gamma.norm();
                if g == 0.0 || g <= EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Make the cross term real by rotating the phase of column q.
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let phase_conj = phase.conj();
                for i in 0..rows {
                    let a = cols_buf[p * rows + i];
                    let b = cols_buf[q * rows + i] * phase_conj;
                    cols_buf[p * rows + i] = a * c - b * s;
                    cols_buf[q * rows + i] = a * s + b * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    for (j, o) in out.iter_mut().enumerate().take(cols) {
        *o = cols_buf[j * rows..(j + 1) * rows]
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
    }
    out[..cols].sort_by(|a, b| b.total_cmp(a));
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Leibniz expansion over all permutations.
    fn permutation_det(m: &ComplexMatrix) -> C64 {
        let n = m.rows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = c(0.0, 0.0);
        permute(&mut perm, 0, m, &mut total);
        total
    }

    fn permute(perm: &mut Vec<usize>, k: usize, m: &ComplexMatrix, total: &mut C64) {
        let n = perm.len();
        if k == n {
            let mut inversions = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if perm[i] > perm[j] {
                        inversions += 1;
                    }
                }
            }
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            let prod = (0..n).fold(c(1.0, 0.0), |acc, i| acc * m[(i, perm[i])]);
            *total += prod * sign;
            return;
        }
        for i in k..n {
            perm.swap(k, i);
            permute(perm, k + 1, m, total);
            perm.swap(k, i);
        }
    }

    #[test]
    fn rank_of_identity() {
        assert_eq!(ComplexMatrix::identity(3).rank(RANK_TOL), 3);
    }

    #[test]
    fn min_singular_value_of_singular_diag() {
        let m = ComplexMatrix::diag(&[c(3.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(m.min_singular_value(), 0.0);
        assert_eq!(m.rank(RANK_TOL), 1);
    }

    #[test]
    fn det_matches_permutation_sum() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(-0.5, 0.3), c(2.0, 0.0)],
            vec![c(0.0, 1.0), c(3.0, -1.0), c(0.7, 0.7)],
            vec![c(-1.0, 0.0), c(0.2, 0.1), c(1.5, -2.0)],
        ])
        .unwrap();
        let lu = m.det().unwrap();
        let leibniz = permutation_det(&m);
        assert!((lu - leibniz).norm() < 1e-12, "{lu} vs {leibniz}");
    }

    #[test]
    fn singular_values_of_wide_and_tall_agree() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 1.0), c(0.0, -1.0)],
            vec![c(0.5, 0.5), c(-1.0, 0.0), c(3.0, 0.0)],
        ])
        .unwrap();
        let a = m.singular_values();
        let b = m.hermitian_transpose().singular_values();
        assert_eq!(a.len(), 2);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        // Sum of squares equals Frobenius norm squared.
        let s: f64 = a.iter().map(|x| x * x).sum();
        assert!((s - m.frobenius_norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn shape_errors() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::Dimension(_))));
        assert!(matches!(a.det(), Err(Error::Dimension(_))));
        assert!(ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0); 3]).is_err());
        assert!(ComplexMatrix::from_vec(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn hermitian_transpose_conjugates() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 2.0), c(3.0, -4.0)]]).unwrap();
        let h = m.hermitian_transpose();
        assert_eq!(h.shape(), (2, 1));
        assert_eq!(h[(0, 0)], c(1.0, -2.0));
        assert_eq!(h[(1, 0)], c(3.0, 4.0));
    }
}
