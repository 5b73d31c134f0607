//! Dense row-major matrices, Cholesky factorization and the flatness
//! diagnostic used to screen kernel matrices.
//!
//! No jitter is ever added here. Callers that want regularization add the
//! nugget explicitly before factoring.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check performed by [`cholesky`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default threshold under which a kernel matrix is reported as flat.
pub const DEFAULT_EPS_FLAT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data. Entries must be finite.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(rows.len(), cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn column_vector(values: &[f64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact panics on 0
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Returns `self + value * I`.
    pub fn with_added_diagonal(&self, value: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out[(i, i)] += value;
        }
        out
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(self
            .row_iter()
            .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: rhs.shape(),
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Copies the sub-block `rows × cols` starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Stacks the rows of `self` on top of the rows of `other`.
    pub fn vstack(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows > 0 && other.rows > 0 && self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            rows: self.rows + other.rows,
            cols,
            data,
        })
    }

    pub fn select_rows(&self, indices: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    fn symmetrized(&self) -> Result<DenseMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (self[(i, j)], self[(j, i)]);
                let diff = (a - b).abs();
                if diff > SYMMETRY_TOL * scale {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        diff,
                    });
                }
                let avg = 0.5 * (a + b);
                out[(i, j)] = avg;
                out[(j, i)] = avg;
            }
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    lower: DenseMatrix,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.lower.rows()
    }

    pub fn lower(&self) -> &DenseMatrix {
        &self.lower
    }

    /// Reassembles `L Lᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.dim();
        let l = &self.lower;
        DenseMatrix::from_fn(n, n, |i, j| {
            let k_max = i.min(j);
            (0..=k_max).map(|k| l[(i, k)] * l[(j, k)]).sum()
        })
    }

    /// `log det(A) = 2 Σ log L_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * self.lower.diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    pub fn solve(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        solve(self, b)
    }

    pub fn solve_vec(&self, b: &[f64]) -> Result<Vec<f64>> {
        Ok(solve(self, &DenseMatrix::column_vector(b))?.into_vec())
    }
}

/// Factors a symmetric positive-definite matrix.
///
/// The input is symmetrized as `(A + Aᵀ)/2` after checking symmetry to
/// [`SYMMETRY_TOL`] relative to the largest entry. A pivot `<= 0` (or NaN)
/// yields [`Error::NotPositiveDefinite`] with a 1-based pivot index.
pub fn cholesky(a: &DenseMatrix) -> Result<CholeskyFactor> {
    let a = a.symmetrized()?;
    let n = a.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let row_j = &l.data[j * n..j * n + j];
        let pivot = a[(j, j)] - row_j.iter().map(|v| v * v).sum::<f64>();
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite {
                pivot: j + 1,
                value: pivot,
            });
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let (head, tail) = l.data.split_at_mut(i * n);
            let row_j = &head[j * n..j * n + j];
            let row_i = &mut tail[..n];
            let dot: f64 = row_i[..j].iter().zip(row_j).map(|(x, y)| x * y).sum();
            row_i[j] = (a[(i, j)] - dot) / d;
        }
    }
    Ok(CholeskyFactor { lower: l })
}

/// Solves `(L Lᵀ) X = B` by forward then back substitution.
pub fn solve(factor: &CholeskyFactor, b: &DenseMatrix) -> Result<DenseMatrix> {
    let n = factor.dim();
    if b.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.rows(),
        });
    }
    let l = &factor.lower;
    let m = b.cols();
    let mut x = b.clone();

    // L Z = B
    for i in 0..n {
        let (done, rest) = x.data.split_at_mut(i * m);
        let xi = &mut rest[..m];
        for k in 0..i {
            let lik = l[(i, k)];
            if lik != 0.0 {
                for (t, s) in xi.iter_mut().zip(&done[k * m..(k + 1) * m]) {
                    *t -= lik * s;
                }
            }
        }
        let d = l[(i, i)];
        xi.iter_mut().for_each(|v| *v /= d);
    }

    // Lᵀ X = Z
    for i in (0..n).rev() {
        let (head, tail) = x.data.split_at_mut((i + 1) * m);
        let xi = &mut head[i * m..];
        for k in (i + 1)..n {
            let lki = l[(k, i)];
            if lki != 0.0 {
                for (t, s) in xi.iter_mut().zip(&tail[(k - i - 1) * m..(k - i) * m]) {
                    *t -= lki * s;
                }
            }
        }
        let d = l[(i, i)];
        xi.iter_mut().for_each(|v| *v /= d);
    }
    Ok(x)
}

/// Minimum over `i != j` of `1 - K_ij / sqrt(K_ii K_jj)`.
///
/// Values at or below a small threshold indicate a flat kernel matrix:
/// two distinct points are numerically perfectly correlated. A 1x1 matrix
/// has no off-diagonal pairs and reports 1.0.
pub fn min_offdiag_correlation_gap(k: &DenseMatrix) -> Result<f64> {
    if !k.is_square() {
        return Err(Error::NotSquare {
            rows: k.rows(),
            cols: k.cols(),
        });
    }
    let diag = k.diagonal();
    if let Some((index, &value)) = diag.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::NonPositiveDiagonal { index, value });
    }
    let sd: Vec<f64> = diag.iter().map(|v| v.sqrt()).collect();
    let n = k.rows();
    let mut gap = if n < 2 { 1.0 } else { f64::INFINITY };
    for i in 0..n {
        for j in 0..n {
            if i != j {
                gap = gap.min(1.0 - k[(i, j)] / (sd[i] * sd[j]));
            }
        }
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn cholesky_identity() {
        let f = cholesky(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(f.lower(), &DenseMatrix::identity(3));
    }

    #[test]
    fn cholesky_two_by_two() {
        let a = m(&[&[4.0, 2.0], &[2.0, 3.0]]);
        let f = cholesky(&a).unwrap();
        let l = f.lower();
        assert_abs_diff_eq!(l[(0, 0)], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l[(0, 1)], 0.0);
        assert_abs_diff_eq!(l[(1, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(l[(1, 1)], 2f64.sqrt(), epsilon = 1e-15);
        let err = f.reconstruct().sub(&a).unwrap().frobenius_norm() / a.frobenius_norm();
        assert!(err < 1e-15);
    }

    #[test]
    fn cholesky_indefinite_reports_second_pivot() {
        let a = m(&[&[1.0, 2.0], &[2.0, 1.0]]);
        match cholesky(&a) {
            Err(Error::NotPositiveDefinite { pivot, value }) => {
                assert_eq!(pivot, 2);
                assert_abs_diff_eq!(value, -3.0, epsilon = 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cholesky_rejects_asymmetric_and_nonsquare() {
        let a = m(&[&[2.0, 1.0], &[0.0, 2.0]]);
        assert!(matches!(cholesky(&a), Err(Error::NotSymmetric { .. })));
        let b = DenseMatrix::zeros(2, 3);
        assert!(matches!(cholesky(&b), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn cholesky_tolerates_roundoff_asymmetry() {
        let a = m(&[&[2.0, 1.0 + 1e-16], &[1.0, 2.0]]);
        assert!(cholesky(&a).is_ok());
    }

    #[test]
    fn solve_identity() {
        let f = cholesky(&DenseMatrix::identity(2)).unwrap();
        let x = solve(&f, &DenseMatrix::column_vector(&[3.0, 5.0])).unwrap();
        assert_eq!(x.as_slice(), &[3.0, 5.0]);
    }

    #[test]
    fn solve_residual() {
        let a = m(&[&[4.0, 2.0], &[2.0, 3.0]]);
        let f = cholesky(&a).unwrap();
        let b = DenseMatrix::column_vector(&[1.0, 0.0]);
        let x = solve(&f, &b).unwrap();
        let r = a.matmul(&x).unwrap().sub(&b).unwrap();
        assert!(r.max_abs() < 1e-12);
        // closed form: A⁻¹ = [[3, -2], [-2, 4]] / 8
        assert_abs_diff_eq!(x[(0, 0)], 3.0 / 8.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x[(1, 0)], -2.0 / 8.0, epsilon = 1e-15);
    }

    #[test]
    fn solve_dimension_mismatch() {
        let f = cholesky(&DenseMatrix::identity(2)).unwrap();
        let b = DenseMatrix::zeros(3, 1);
        assert_eq!(
            solve(&f, &b),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn correlation_gap_examples() {
        assert_eq!(
            min_offdiag_correlation_gap(&DenseMatrix::identity(2)).unwrap(),
            1.0
        );
        assert_eq!(
            min_offdiag_correlation_gap(&m(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap(),
            0.0
        );
        let g = min_offdiag_correlation_gap(&m(&[&[1.0, 0.94], &[0.94, 1.0]])).unwrap();
        assert_abs_diff_eq!(g, 0.06, epsilon = 1e-15);
        assert_eq!(
            min_offdiag_correlation_gap(&m(&[&[3.0]])).unwrap(),
            1.0
        );
    }

    #[test]
    fn correlation_gap_rejects_bad_diagonal() {
        let k = m(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert!(matches!(
            min_offdiag_correlation_gap(&k),
            Err(Error::NonPositiveDiagonal { index: 1, .. })
        ));
    }

    #[test]
    fn from_row_major_rejects_nan() {
        assert!(matches!(
            DenseMatrix::from_row_major(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
    }
}
