//! Total unimodularity and unimodularity of integer matrices.
//!
//! Both tests enumerate square submatrices and compute their determinants
//! exactly. They are meant for the small matrices that arise from demand
//! types of hand-sized markets, and refuse to run past a [`Budget`].

use itertools::Itertools;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{is_unit_or_zero, minor, IntMatrix};

/// A square submatrix whose determinant is outside `{-1, 0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub determinant: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TuVerdict {
    TotallyUnimodular,
    Violated(MinorWitness),
}

impl TuVerdict {
    pub fn is_totally_unimodular(&self) -> bool {
        matches!(self, TuVerdict::TotallyUnimodular)
    }

    pub fn witness(&self) -> Option<&MinorWitness> {
        match self {
            TuVerdict::TotallyUnimodular => None,
            TuVerdict::Violated(w) => Some(w),
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Indices of the first representative of each distinct vector, treating a
/// vector and its negation as equal and skipping zero vectors. Negating or
/// duplicating a row or column does not change total unimodularity.
fn distinct_up_to_sign(vectors: &[Vec<i64>]) -> Vec<usize> {
    let mut keep: Vec<usize> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        let neg: Vec<i64> = v.iter().map(|x| -x).collect();
        if keep.iter().any(|&j| vectors[j] == *v || vectors[j] == neg) {
            continue;
        }
        keep.push(i);
    }
    keep
}

/// Decides whether every square submatrix of `m` has determinant in
/// `{-1, 0, 1}`.
///
/// Submatrices are visited by increasing order, then by row subset and
/// column subset in lexicographic order. Zero rows and columns and repeated
/// rows and columns (up to sign) are skipped; the returned witness refers to
/// indices of `m` itself.
pub fn is_totally_unimodular(m: &IntMatrix, budget: &Budget) -> Result<TuVerdict> {
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if m.get(r, c).abs() >= 2 {
                return Ok(TuVerdict::Violated(MinorWitness {
                    rows: vec![r],
                    cols: vec![c],
                    determinant: BigInt::from(m.get(r, c)),
                }));
            }
        }
    }
    let rows = distinct_up_to_sign(&m.to_rows());
    let cols = distinct_up_to_sign(&m.columns());
    let order = rows.len().min(cols.len());
    if order > budget.max_minor_order {
        return Err(Error::BudgetExceeded {
            what: "total unimodularity (submatrix order)",
            required: order as u128,
            limit: budget.max_minor_order as u128,
        });
    }
    let count = (1..=order).fold(0u128, |acc, k| {
        acc.saturating_add(binomial(rows.len(), k).saturating_mul(binomial(cols.len(), k)))
    });
    if count > budget.max_submatrices {
        return Err(Error::BudgetExceeded {
            what: "total unimodularity (submatrix count)",
            required: count,
            limit: budget.max_submatrices,
        });
    }
    let mut scratch = Vec::new();
    // Entries are already in {-1,0,1}, so order 1 cannot fail.
    for k in 2..=order {
        for rs in rows.iter().copied().combinations(k) {
            for cs in cols.iter().copied().combinations(k) {
                let det = minor(m, &rs, &cs, &mut scratch);
                if !is_unit_or_zero(&det) {
                    return Ok(TuVerdict::Violated(MinorWitness {
                        rows: rs,
                        cols: cs,
                        determinant: det,
                    }));
                }
            }
        }
    }
    Ok(TuVerdict::TotallyUnimodular)
}

/// Coordinates of the columns of `m` in an integral basis of the lattice
/// `span(m) ∩ Z^n`. The result has `rank(m)` rows.
fn lattice_coordinates(m: &IntMatrix) -> Result<IntMatrix> {
    let n = m.rows();
    let rank = m.rank();
    if rank == n {
        return Ok(m.clone());
    }
    let big = |v: Vec<i64>| -> Vec<BigInt> { v.into_iter().map(BigInt::from).collect() };
    // Integer vectors orthogonal to every column: the rational kernel of m^T.
    let transposed: Vec<Vec<BigInt>> = m.columns().into_iter().map(big).collect();
    let normals = linalg::rational_kernel(&transposed, n);
    debug_assert_eq!(normals.len(), n - rank);
    // span(m) ∩ Z^n is exactly the integer kernel of the normals.
    let basis = linalg::integer_kernel(&normals, n);
    debug_assert_eq!(basis.len(), rank);
    let mut coords = IntMatrix::zeros(rank, m.cols());
    for (j, column) in m.columns().into_iter().enumerate() {
        let column = big(column);
        let c = linalg::solve_in_basis(&basis, &column)
            .ok_or_else(|| Error::Internal("column outside its own span".into()))?;
        for (i, x) in c.iter().enumerate() {
            if !x.is_integer() {
                return Err(Error::Internal(
                    "column is not an integer combination of the lattice basis".into(),
                ));
            }
            let v: i64 = x
                .to_integer()
                .try_into()
                .map_err(|_| Error::Internal("lattice coordinate does not fit in i64".into()))?;
            coords.set(i, j, v);
        }
    }
    Ok(coords)
}

/// Decides whether every linearly independent subset of the columns of `m`
/// extends to an integral basis of determinant ±1.
///
/// For a matrix of full row rank this holds exactly when every maximal square
/// column submatrix has determinant in `{-1, 0, 1}`. Otherwise the columns are
/// first rewritten in an integral basis of the lattice they span rationally,
/// which has full row rank.
pub fn is_unimodular(m: &IntMatrix, budget: &Budget) -> Result<bool> {
    Ok(unimodularity_violation(m, budget)?.is_none())
}

/// Column subset (of size `rank(m)`) whose lattice is not saturated, if any.
pub fn unimodularity_violation(m: &IntMatrix, budget: &Budget) -> Result<Option<Vec<usize>>> {
    if m.cols() == 0 || m.rank() == 0 {
        return Ok(None);
    }
    let coords = lattice_coordinates(m)?;
    let r = coords.rows();
    if r > budget.max_minor_order {
        return Err(Error::BudgetExceeded {
            what: "unimodularity (basis order)",
            required: r as u128,
            limit: budget.max_minor_order as u128,
        });
    }
    let count = binomial(coords.cols(), r);
    if count > budget.max_submatrices {
        return Err(Error::BudgetExceeded {
            what: "unimodularity (basis count)",
            required: count,
            limit: budget.max_submatrices,
        });
    }
    let all_rows: Vec<usize> = (0..r).collect();
    let mut scratch = Vec::new();
    for cs in (0..coords.cols()).combinations(r) {
        let det = minor(&coords, &all_rows, &cs, &mut scratch);
        if !is_unit_or_zero(&det) {
            return Ok(Some(cs));
        }
    }
    Ok(None)
}
