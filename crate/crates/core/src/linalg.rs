//! Small dense matrices, LU factorisation with partial pivoting and a
//! 1-norm condition estimate.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major square or rectangular matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(T::zero(), |acc, i| acc + self[(i, j)].abs()))
            .fold(T::zero(), T::max)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// PA = LU with unit lower-triangular L.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    factors: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &Matrix<T>) -> Result<Self> {
        let n = a.rows();
        if n != a.cols() {
            return Err(Error::InvalidParameter(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let mut f = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, max) =
                (k..n)
                    .map(|i| (i, f[(i, k)].abs()))
                    .fold(
                        (k, -T::one()),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if !(max > T::zero()) || !max.is_finite() {
                return Err(Error::SingularMatrix { pivot: k });
            }
            if p != k {
                for j in 0..n {
                    let tmp = f[(k, j)];
                    f[(k, j)] = f[(p, j)];
                    f[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let pivot = f[(k, k)];
            for i in k + 1..n {
                let l = f[(i, k)] / pivot;
                f[(i, k)] = l;
                if l != T::zero() {
                    for j in k + 1..n {
                        let u = f[(k, j)];
                        f[(i, j)] -= l * u;
                    }
                }
            }
        }
        Ok(Self { factors: f, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Solves A x = b.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let f = &self.factors;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = f[(i, j)];
                let prev = x[j];
                x[i] -= l * prev;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = f[(i, j)];
                let prev = x[j];
                x[i] -= u * prev;
            }
            x[i] /= f[(i, i)];
        }
        x
    }

    /// Solves Aᵀ x = b.
    pub fn solve_transpose(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let f = &self.factors;
        // Aᵀ = Uᵀ Lᵀ P, so solve Uᵀ w = b, Lᵀ v = w, x = Pᵀ v.
        let mut w = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                let u = f[(j, i)];
                let prev = w[j];
                w[i] -= u * prev;
            }
            w[i] /= f[(i, i)];
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let l = f[(j, i)];
                let prev = w[j];
                w[i] -= l * prev;
            }
        }
        let mut x = vec![T::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        x
    }

    /// Estimate of ‖A⁻¹‖₁ (Hager's method with Higham's extra test vector).
    pub fn inverse_norm_one_estimate(&self) -> T {
        let n = self.dim();
        if n == 0 {
            return T::zero();
        }
        let norm1 = |v: &[T]| v.iter().fold(T::zero(), |acc, x| acc + x.abs());
        let mut x = vec![T::one() / T::of_usize(n); n];
        let mut est = T::zero();
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve(&x);
            est = est.max(norm1(&y));
            let signs: Vec<T> = y
                .iter()
                .map(|&v| if v >= T::zero() { T::one() } else { -T::one() })
                .collect();
            let z = self.solve_transpose(&signs);
            let (j, zmax) = z.iter().enumerate().fold((0, -T::one()), |b, (i, v)| {
                if v.abs() > b.1 {
                    (i, v.abs())
                } else {
                    b
                }
            });
            let ztx = z
                .iter()
                .zip(&x)
                .fold(T::zero(), |acc, (a, b)| acc + *a * *b);
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x.iter_mut().for_each(|v| *v = T::zero());
            x[j] = T::one();
        }
        let alt: Vec<T> = (0..n)
            .map(|i| {
                let mag = T::one() + T::of_usize(i) / T::of_usize((n - 1).max(1));
                if i % 2 == 0 {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        let alt_est = T::of(2.0) * norm1(&self.solve(&alt)) / (T::of(3.0) * T::of_usize(n));
        est.max(alt_est)
    }
}

/// ‖A‖₁ ‖A⁻¹‖₁ with the inverse norm estimated from the factors.
pub fn condition_estimate<T: Real>(a: &Matrix<T>, lu: &Lu<T>) -> T {
    a.norm_one() * lu.inverse_norm_one_estimate()
}
