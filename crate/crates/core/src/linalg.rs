//! Dense row-major matrices and rank computation by row reduction.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from nested rows, rejecting empty or ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        if n_rows == 0 {
            return Err(Error::BadShape("matrix has no rows"));
        }
        let n_cols = rows[0].as_ref().len();
        if n_cols == 0 {
            return Err(Error::BadShape("matrix has no columns"));
        }
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::BadShape("ragged rows"));
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Rank and nullity (dimension of the right null space) of `m`.
///
/// Gaussian elimination with partial pivoting; a column contributes a pivot
/// only if its largest remaining entry exceeds `tol` in absolute value.
pub fn rank_and_nullity(m: &Matrix, tol: f64) -> (usize, usize) {
    let rank = row_echelon(m.clone(), tol).len();
    (rank, m.cols() - rank)
}

/// Reduces `a` in place and returns the pivot columns in order.
pub(crate) fn row_echelon(mut a: Matrix, tol: f64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols() {
        if r == a.rows() {
            break;
        }
        let (best, best_abs) = (r..a.rows())
            .map(|i| (i, a[(i, c)].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= tol {
            continue;
        }
        swap_rows(&mut a, r, best);
        let p = a[(r, c)];
        for i in r + 1..a.rows() {
            let factor = a[(i, c)] / p;
            if factor != 0.0 {
                for j in c..a.cols() {
                    let v = a[(r, j)];
                    a[(i, j)] -= factor * v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub(crate) fn swap_rows(a: &mut Matrix, i: usize, k: usize) {
    if i == k {
        return;
    }
    let cols = a.cols();
    for j in 0..cols {
        a.data.swap(i * cols + j, k * cols + j);
    }
}

/// Solves `a x = b` for a matrix with full column rank, checking consistency
/// of the surplus rows. Returns `None` when a pivot falls below `tol` or the
/// system is inconsistent beyond `resid_tol`.
pub(crate) fn solve_full_column_rank(
    a: &Matrix,
    b: &[f64],
    tol: f64,
    resid_tol: f64,
) -> Option<Vec<f64>> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return None;
    }
    let mut aug = Matrix::from_fn(m, n + 1, |i, j| if j < n { a[(i, j)] } else { b[i] });
    for c in 0..n {
        let (best, best_abs) = (c..m)
            .map(|i| (i, aug[(i, c)].abs()))
            .fold((c, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= tol {
            return None;
        }
        swap_rows(&mut aug, c, best);
        let p = aug[(c, c)];
        for i in 0..m {
            if i == c {
                continue;
            }
            let factor = aug[(i, c)] / p;
            if factor != 0.0 {
                for j in c..=n {
                    let v = aug[(c, j)];
                    aug[(i, j)] -= factor * v;
                }
            }
        }
    }
    let x: Vec<f64> = (0..n).map(|i| aug[(i, n)] / aug[(i, i)]).collect();
    let resid = a
        .mul_vec(&x)
        .iter()
        .zip(b)
        .map(|(l, r)| (l - r).abs())
        .fold(0.0, f64::max);
    (resid <= resid_tol).then_some(x)
}
