//! Small dense linear algebra over `f64` and over jets.
//!
//! Systems here are at most 4×4, so plain Gaussian elimination with partial
//! pivoting is both the simplest and the most accurate choice. The jet
//! variant pivots on constant terms.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::jet::{TaylorValue, SINGULAR_TOL};

/// Scalar types the elimination can run over.
pub trait Pivot: Clone {
    fn magnitude(&self) -> f64;
    fn try_div(&self, rhs: &Self) -> Result<Self>;
    /// `self − a·b`
    fn sub_mul(&self, a: &Self, b: &Self) -> Self;
}

impl Pivot for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.abs() <= SINGULAR_TOL {
            return Err(Error::Singular(*rhs));
        }
        Ok(self / rhs)
    }

    fn sub_mul(&self, a: &Self, b: &Self) -> Self {
        self - a * b
    }
}

impl Pivot for TaylorValue {
    fn magnitude(&self) -> f64 {
        self.value().abs()
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        self.checked_div(rhs)
    }

    fn sub_mul(&self, a: &Self, b: &Self) -> Self {
        self - &(a * b)
    }
}

/// Solves `A·X = B` for several right-hand sides. `a` is row-major `n×n`,
/// `b` is `n` rows of `m` columns.
pub fn solve_many<T: Pivot>(mut a: Vec<Vec<T>>, mut b: Vec<Vec<T>>) -> Result<Vec<Vec<T>>> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: a.iter().map(Vec::len).max().unwrap_or(0) });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    let scale = a.iter().flatten().map(Pivot::magnitude).fold(0.0, f64::max);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].magnitude().total_cmp(&a[j][col].magnitude()))
            .expect("non-empty range");
        if a[piv][col].magnitude() <= SINGULAR_TOL * scale.max(1.0) {
            return Err(Error::Singular(a[piv][col].magnitude()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let factor = a[row][col].try_div(&a[col][col])?;
            for k in col + 1..n {
                a[row][k] = a[row][k].sub_mul(&factor, &a[col][k]);
            }
            for k in 0..b[row].len() {
                b[row][k] = b[row][k].sub_mul(&factor, &b[col][k]);
            }
        }
    }
    for col in (0..n).rev() {
        for k in 0..b[col].len() {
            let mut acc = b[col][k].clone();
            for j in col + 1..n {
                acc = acc.sub_mul(&a[col][j], &b[j][k]);
            }
            b[col][k] = acc.try_div(&a[col][col])?;
        }
    }
    Ok(b)
}

pub fn solve<T: Pivot>(a: Vec<Vec<T>>, b: Vec<T>) -> Result<Vec<T>> {
    let cols = solve_many(a, b.into_iter().map(|v| vec![v]).collect())?;
    Ok(cols.into_iter().map(|mut r| r.pop().expect("one column")).collect())
}

fn rows(a: &Array2<f64>) -> Vec<Vec<f64>> {
    a.rows().into_iter().map(|r| r.to_vec()).collect()
}

pub fn inverse(a: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.ncols() });
    }
    let id = rows(&Array2::eye(n));
    let x = solve_many(rows(a), id)?;
    Ok(Array2::from_shape_fn((n, n), |(i, j)| x[i][j]))
}

/// Determinant by elimination; exactly zero for a structurally singular matrix.
pub fn det(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut m = rows(a);
    let mut d = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .expect("non-empty range");
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(col, piv);
            d = -d;
        }
        d *= m[col][col];
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    d
}
