//! Dense row-major matrices and the exact integer determinant.

use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::json::JsonInt;
use crate::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        let n = rows.len();
        Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub type IntMatrix = Matrix<BigInt>;

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { BigInt::one() } else { BigInt::zero() })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
    }

    /// Panics on a dimension mismatch.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(BigInt::zero(), |acc, k| acc + &self[(i, k)] * &other[(k, j)])
        })
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(BigInt::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    /// Minor obtained by deleting row `r` and column `c`.
    pub fn minor(&self, r: usize, c: usize) -> IntMatrix {
        let keep_rows: Vec<usize> = (0..self.rows).filter(|&i| i != r).collect();
        let keep_cols: Vec<usize> = (0..self.cols).filter(|&j| j != c).collect();
        Matrix::from_fn(keep_rows.len(), keep_cols.len(), |i, j| {
            self[(keep_rows[i], keep_cols[j])].clone()
        })
    }

    /// Classical adjugate: `adj(A) * A = det(A) * I`.
    pub fn adjugate(&self) -> Result<IntMatrix, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 1 {
            return Ok(IntMatrix::identity(1));
        }
        let mut adj = Matrix::from_fn(n, n, |_, _| BigInt::zero());
        for i in 0..n {
            for j in 0..n {
                let cof = det_int(&self.minor(i, j))?;
                adj[(j, i)] = if (i + j) % 2 == 0 { cof } else { -cof };
            }
        }
        Ok(adj)
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_int(m: &IntMatrix) -> Result<BigInt, AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::NonSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.to_rows();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                // exact by Sylvester's identity
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<JsonInt>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(crate::json::wrap).collect())
            .collect();
        rows.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Laplace expansion along the first row; exponential but independent.
    fn det_cofactor(m: &IntMatrix) -> BigInt {
        let n = m.rows();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return m[(0, 0)].clone();
        }
        (0..n).fold(BigInt::zero(), |acc, j| {
            let term = &m[(0, j)] * det_cofactor(&m.minor(0, j));
            if j % 2 == 0 {
                acc + term
            } else {
                acc - term
            }
        })
    }

    #[test]
    fn identity_and_small_cases() {
        assert_eq!(det_int(&IntMatrix::identity(4)).unwrap(), BigInt::one());
        let swap = IntMatrix::from_i64_rows(&[&[0, 2], &[1, 0]]);
        assert_eq!(det_int(&swap).unwrap(), BigInt::from(-2));
        let singular = IntMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert!(det_int(&singular).unwrap().is_zero());
    }

    #[test]
    fn template_matrix_for_151() {
        let m = IntMatrix::from_i64_rows(&[
            &[1, -2, -2, -4],
            &[-1, 1, -2, -2],
            &[-2, -4, -1, -6],
            &[-2, -2, -3, -1],
        ]);
        assert_eq!(det_cofactor(&m), BigInt::from(-151));
        assert_eq!(det_int(&m).unwrap(), BigInt::from(-151));
    }

    #[test]
    fn non_square_is_rejected() {
        let m = Matrix::from_rows(vec![vec![BigInt::one(), BigInt::zero()]]);
        assert_eq!(det_int(&m), Err(AlgebraError::NonSquare { rows: 1, cols: 2 }));
    }

    #[test]
    fn adjugate_identity() {
        let m = IntMatrix::from_i64_rows(&[&[2, -1, 0], &[3, 5, 7], &[-4, 1, 1]]);
        let det = det_int(&m).unwrap();
        let prod = m.adjugate().unwrap().mul(&m);
        assert_eq!(prod, IntMatrix::identity(3).map(|v| v * &det));
    }

    proptest::proptest! {
        #[test]
        fn bareiss_agrees_with_cofactor_expansion(
            n in 1usize..6,
            entries in proptest::collection::vec(-9i64..=9, 36),
        ) {
            let m = Matrix::from_fn(n, n, |i, j| BigInt::from(entries[i * 6 + j]));
            proptest::prop_assert_eq!(det_int(&m).unwrap(), det_cofactor(&m));
        }
    }
}
