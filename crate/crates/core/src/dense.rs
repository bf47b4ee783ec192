//! Small dense matrices over an exact field.
//!
//! Used for the defining representation of the Lie algebra, the metric and
//! its inverse, and as an independent oracle for spin identities on
//! `(C^N)^{⊗2}`.

use std::ops::{Add, Mul, Sub};

use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DenseMatrix<C> {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl<C: Scalar> DenseMatrix<C> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![C::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C::one();
        }
        m
    }

    /// Matrix unit `E^{ab}` of size `n`, 1-based indices.
    pub fn unit(n: usize, a: usize, b: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.set(a - 1, b - 1, C::one());
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry at 0-based `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, c: &C) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> C {
        (0..self.rows.min(self.cols)).fold(C::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && *self == self.transpose()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            let (ia, ib) = (i / other.rows, i % other.rows);
            let (ja, jb) = (j / other.cols, j % other.cols);
            self.get(ia, ja).clone() * other.get(ib, jb).clone()
        })
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Row-reduced echelon form and the pivot count.
    fn reduce(&self) -> (Self, usize) {
        let mut m = self.clone();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            let Some(p) = (pivot_row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, pivot_row * m.cols + j);
            }
            let inv = C::one() / m.get(pivot_row, col).clone();
            for j in 0..m.cols {
                let v = m.get(pivot_row, j).clone() * inv.clone();
                m.set(pivot_row, j, v);
            }
            for r in 0..m.rows {
                if r == pivot_row || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for j in 0..m.cols {
                    let v = m.get(r, j).clone() - factor.clone() * m.get(pivot_row, j).clone();
                    m.set(r, j, v);
                }
            }
            pivot_row += 1;
            if pivot_row == m.rows {
                break;
            }
        }
        (m, pivot_row)
    }

    pub fn rank(&self) -> usize {
        self.reduce().1
    }

    /// Exact inverse by Gauss-Jordan elimination; `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                C::one()
            } else {
                C::zero()
            }
        });
        let (red, rank) = aug.reduce();
        if rank < n || (0..n).any(|i| !red.get(i, i).is_one()) {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| red.get(i, n + j).clone()))
    }
}

impl<C: Scalar> Add for &DenseMatrix<C> {
    type Output = DenseMatrix<C>;

    fn add(self, rhs: &DenseMatrix<C>) -> DenseMatrix<C> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<C: Scalar> Sub for &DenseMatrix<C> {
    type Output = DenseMatrix<C>;

    fn sub(self, rhs: &DenseMatrix<C>) -> DenseMatrix<C> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<C: Scalar> Mul for &DenseMatrix<C> {
    type Output = DenseMatrix<C>;

    fn mul(self, rhs: &DenseMatrix<C>) -> DenseMatrix<C> {
        assert_eq!(self.cols, rhs.rows, "matrix dimensions do not chain");
        let mut out = DenseMatrix::<C>::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).clone() + a.clone() * b.clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Rational, Scalar};

    fn m(rows: &[&[i64]]) -> DenseMatrix<Rational> {
        DenseMatrix::from_fn(rows.len(), rows[0].len(), |i, j| Rational::from_int(rows[i][j]))
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, DenseMatrix::identity(3));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn kron_of_units() {
        let e = DenseMatrix::<Rational>::unit(2, 1, 2).kron(&DenseMatrix::unit(2, 2, 1));
        // |1,2><2,1| in the 4-dim product basis: row 1, column 2 (0-based).
        assert_eq!(*e.get(1, 2), Rational::from_int(1));
        assert_eq!(e.trace(), Rational::from_int(0));
    }

    #[test]
    fn rank_counts_independent_rows() {
        assert_eq!(m(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]).rank(), 2);
    }
}
