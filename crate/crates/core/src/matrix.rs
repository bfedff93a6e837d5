//! Dense integer matrices with exact determinants.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidMatrix("rows have different lengths".into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    /// Builds an `n_rows`-row matrix whose columns are `columns`.
    pub fn from_columns(n_rows: usize, columns: &[Vec<i64>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != n_rows) {
            return Err(Error::InvalidMatrix(format!(
                "every column must have {n_rows} entries"
            )));
        }
        let mut m = IntMatrix::zeros(n_rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: i64) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<i64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<i64>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// `[self | other]`.
    pub fn hconcat(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows {
            return Err(Error::InvalidMatrix(format!(
                "cannot concatenate {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let mut columns = self.columns();
        columns.extend(other.columns());
        IntMatrix::from_columns(self.rows, &columns)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                m.set(i, j, self.get(r, c));
            }
        }
        m
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.data.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    /// Product with an exact rational vector.
    pub fn mul_vec(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        if v.len() != self.cols {
            return Err(Error::InvalidMatrix(format!(
                "vector of length {} does not match {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| **a != 0)
                    .map(|(&a, x)| x * BigRational::from_integer(BigInt::from(a)))
                    .fold(BigRational::zero(), |acc, t| acc + t)
            })
            .collect())
    }

    /// Exact determinant of a square matrix.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::InvalidMatrix(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let mut scratch: Vec<i128> = self.data.iter().map(|&x| i128::from(x)).collect();
        Ok(match bareiss_i128(&mut scratch, self.rows) {
            Some(d) => BigInt::from(d),
            None => bareiss_big(
                self.data.iter().map(|&x| BigInt::from(x)).collect(),
                self.rows,
            ),
        })
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<BigRational>> = (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .map(|&x| BigRational::from_integer(x.into()))
                    .collect()
            })
            .collect();
        crate::linalg::rref(rows, self.cols).1.len()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .data
            .iter()
            .map(|x| x.to_string().len())
            .max()
            .unwrap_or(1);
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|x| format!("{x:>width$}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Fraction-free Gaussian elimination on a `k`x`k` row-major buffer.
/// Returns `None` if an intermediate value overflows.
pub(crate) fn bareiss_i128(a: &mut [i128], k: usize) -> Option<i128> {
    if k == 0 {
        return Some(1);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for p in 0..k - 1 {
        if a[p * k + p] == 0 {
            let Some(swap) = (p + 1..k).find(|&r| a[r * k + p] != 0) else {
                return Some(0);
            };
            for c in 0..k {
                a.swap(p * k + c, swap * k + c);
            }
            sign = -sign;
        }
        let pivot = a[p * k + p];
        for r in p + 1..k {
            for c in p + 1..k {
                let lhs = a[r * k + c].checked_mul(pivot)?;
                let rhs = a[r * k + p].checked_mul(a[p * k + c])?;
                a[r * k + c] = lhs.checked_sub(rhs)? / prev;
            }
            a[r * k + p] = 0;
        }
        prev = pivot;
    }
    Some(sign * a[(k - 1) * k + (k - 1)])
}

fn bareiss_big(mut a: Vec<BigInt>, k: usize) -> BigInt {
    if k == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for p in 0..k - 1 {
        if a[p * k + p].is_zero() {
            match (p + 1..k).find(|&r| !a[r * k + p].is_zero()) {
                Some(swap) => {
                    for c in 0..k {
                        a.swap(p * k + c, swap * k + c);
                    }
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        let pivot = a[p * k + p].clone();
        for r in p + 1..k {
            for c in p + 1..k {
                let v = (&a[r * k + c] * &pivot - &a[r * k + p] * &a[p * k + c]) / &prev;
                a[r * k + c] = v;
            }
            a[r * k + p] = BigInt::zero();
        }
        prev = pivot;
    }
    sign * a[(k - 1) * k + (k - 1)].clone()
}

/// Determinant of the square submatrix picked by `rows` and `cols`.
pub(crate) fn minor(
    m: &IntMatrix,
    rows: &[usize],
    cols: &[usize],
    scratch: &mut Vec<i128>,
) -> BigInt {
    let k = rows.len();
    scratch.clear();
    for &r in rows {
        for &c in cols {
            scratch.push(i128::from(m.get(r, c)));
        }
    }
    if has_zero_column(scratch, k) {
        return BigInt::zero();
    }
    match bareiss_i128(scratch, k) {
        Some(d) => BigInt::from(d),
        None => m.submatrix(rows, cols).determinant().expect("square"),
    }
}

fn has_zero_column(a: &[i128], k: usize) -> bool {
    (0..k).any(|c| (0..k).all(|r| a[r * k + c] == 0))
}

/// `|d| <= 1`.
pub(crate) fn is_unit_or_zero(d: &BigInt) -> bool {
    d.abs() <= BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn small_determinants() {
        assert_eq!(
            m(&[&[1, 1], &[1, -1]]).determinant().unwrap(),
            BigInt::from(-2)
        );
        assert_eq!(
            IntMatrix::identity(4).determinant().unwrap(),
            BigInt::from(1)
        );
        assert_eq!(
            m(&[&[0, 1], &[1, 0]]).determinant().unwrap(),
            BigInt::from(-1)
        );
        assert_eq!(
            m(&[&[2, 4], &[1, 2]]).determinant().unwrap(),
            BigInt::from(0)
        );
        assert_eq!(
            m(&[&[2, -3, 1], &[2, 0, -1], &[1, 4, 5]])
                .determinant()
                .unwrap(),
            BigInt::from(49)
        );
    }

    #[test]
    fn singular_with_zero_leading_column() {
        assert_eq!(
            m(&[&[0, 1, 2], &[0, 3, 4], &[0, 5, 6]])
                .determinant()
                .unwrap(),
            BigInt::from(0)
        );
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX / 2;
        let a = m(&[&[big, 1, 0], &[1, big, 1], &[0, 1, big]]);
        let b = BigInt::from(big);
        let expected = &b * &b * &b - &b - &b;
        assert_eq!(a.determinant().unwrap(), expected);
    }

    #[test]
    fn rejects_non_square_determinant() {
        assert!(m(&[&[1, 2, 3]]).determinant().is_err());
    }

    #[test]
    fn rank_and_concat() {
        let a = m(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ai = a.hconcat(&IntMatrix::identity(3)).unwrap();
        assert_eq!(ai.cols(), 6);
        assert_eq!(ai.rank(), 3);
    }
}
