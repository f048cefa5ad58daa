//! Exact rational arithmetic helpers.
//!
//! Cell geometry is done in pi-units with `Rational64`, so strict-inequality
//! decisions (membership, vertex identity, translate disjointness) are exact.
//! The matrices here are only used for small exact checks (Lie brackets on
//! matrix units, ad zero patterns, Hessian pivots); floating point never
//! enters these paths.

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

pub type Q = Rational64;

/// Shorthand rational constructor.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(num, den)
}

pub fn qi(num: i64) -> Q {
    Q::from_integer(num)
}

pub fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Solves a small square system `a * x = b` by Gaussian elimination with
/// exact pivoting. Returns `None` when `a` is singular.
pub fn solve_square(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot_row);
        let pivot = m[col][col];
        for item in m[col].iter_mut() {
            *item /= pivot;
        }
        let pivot_row_values = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let factor = row[col];
                for (t, &p) in row.iter_mut().zip(&pivot_row_values).skip(col) {
                    *t -= factor * p;
                }
            }
        }
    }
    Some(m.iter().map(|row| row[n]).collect())
}

/// Decides positive definiteness of a symmetric rational matrix by exact
/// elimination pivots (Sylvester's criterion via fraction-free Gaussian
/// elimination without row exchanges).
pub fn is_positive_definite(sym: &[Vec<Q>]) -> bool {
    let n = sym.len();
    let mut m: Vec<Vec<Q>> = sym.to_vec();
    for k in 0..n {
        if !m[k][k].is_positive() {
            return false;
        }
        let pivot = m[k][k];
        let pivot_row = m[k].clone();
        for row in m.iter_mut().skip(k + 1) {
            let factor = row[k] / pivot;
            for (t, &p) in row.iter_mut().zip(&pivot_row).skip(k) {
                *t -= factor * p;
            }
        }
    }
    true
}

/// Dense rational matrix, only as large as the exact structure checks need.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Q>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    /// Matrix unit E_{kh} (1 at row k, column h).
    pub fn unit(n: usize, k: usize, h: usize) -> Self {
        let mut m = QMat::zeros(n, n);
        m[(k, h)] = Q::one();
        m
    }

    pub fn diagonal(entries: &[Q]) -> Self {
        let n = entries.len();
        let mut m = QMat::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        let mut out = QMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (o, &b) in out.data.iter_mut().zip(&other.data) {
            *o -= b;
        }
        out
    }

    pub fn scale(&self, s: Q) -> QMat {
        let mut out = self.clone();
        for o in out.data.iter_mut() {
            *o *= s;
        }
        out
    }

    pub fn add_assign(&mut self, other: &QMat) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (o, &b) in self.data.iter_mut().zip(&other.data) {
            *o += b;
        }
    }

    /// Lie bracket [a, b] = ab - ba.
    pub fn bracket(&self, other: &QMat) -> QMat {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Q::is_zero)
    }

    pub fn trace(&self) -> Q {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Q;
    fn index(&self, (r, c): (usize, usize)) -> &Q {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Q {
        &mut self.data[r * self.cols + c]
    }
}
