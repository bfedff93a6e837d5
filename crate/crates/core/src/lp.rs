//! Exact linear programming over `{z | A z = b, z >= 0}`.

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::IntMatrix;
use crate::rational::Rational;

/// A vertex of `{z | A z = b, z >= 0}` found by the two-phase simplex
/// method's first phase, pivoting by Bland's rule.
///
/// Artificial variables start as the basis. Once their sum reaches zero any
/// artificial still basic is pivoted out on the lowest-index original column
/// with a nonzero entry in its row; rows with no such column are redundant.
pub fn basic_feasible_solution(a: &IntMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::InvalidMatrix(format!(
            "right-hand side has {} entries for {m} rows",
            b.len()
        )));
    }
    let width = n + m + 1;
    // Tableau rows: [A | I | b], negated where b < 0 so the start is feasible.
    let mut rows: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let flip = b[i].is_negative();
            let sign = |x: Rational| if flip { -x } else { x };
            let mut row = Vec::with_capacity(width);
            row.extend((0..n).map(|j| sign(Rational::from_integer(BigInt::from(a.get(i, j))))));
            row.extend((0..m).map(|k| {
                if k == i {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            row.push(sign(b[i].clone()));
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced costs of minimising the sum of artificials.
    let mut cost: Vec<Rational> = (0..width)
        .map(|j| {
            if (n..n + m).contains(&j) {
                Rational::zero()
            } else {
                -rows.iter().fold(Rational::zero(), |acc, r| acc + &r[j])
            }
        })
        .collect();

    while let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) {
        let leave = (0..m)
            .filter(|&i| rows[i][enter].is_positive())
            .map(|i| (&rows[i][width - 1] / &rows[i][enter], basis[i], i))
            .min()
            .map(|(_, _, i)| i)
            .ok_or_else(|| Error::Internal("phase one is unbounded".into()))?;
        pivot(&mut rows, &mut cost, leave, enter);
        basis[leave] = enter;
    }
    if !cost[width - 1].is_zero() {
        return Err(Error::Infeasible);
    }
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !rows[i][j].is_zero()) {
                pivot(&mut rows, &mut cost, i, j);
                basis[i] = j;
            }
        }
    }
    let mut z = vec![Rational::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            z[j] = rows[i][width - 1].clone();
        }
    }
    Ok(z)
}

fn pivot(rows: &mut [Vec<Rational>], cost: &mut [Rational], r: usize, c: usize) {
    let inv = rows[r][c].recip();
    for x in rows[r].iter_mut() {
        *x *= &inv;
    }
    let pivot_row = rows[r].clone();
    let eliminate = |row: &mut Vec<Rational>| {
        if !row[c].is_zero() {
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &factor * p;
            }
        }
    };
    for (i, row) in rows.iter_mut().enumerate() {
        if i != r {
            eliminate(row);
        }
    }
    let mut cost_row = cost.to_vec();
    eliminate(&mut cost_row);
    cost.clone_from_slice(&cost_row);
}

/// Every vertex of `{z | A z = b, z >= 0}`, by trying each set of
/// `rank(A)` linearly independent columns as a basis. Vertices are returned
/// deduplicated, in the order their first basis is met.
pub fn enumerate_vertices(
    a: &IntMatrix,
    b: &[Rational],
    budget: &Budget,
) -> Result<Vec<Vec<Rational>>> {
    let n = a.cols();
    let rank = a.rank();
    let count = (0..rank).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    });
    if count > budget.max_submatrices {
        return Err(Error::BudgetExceeded {
            what: "vertex enumeration (bases)",
            required: count,
            limit: budget.max_submatrices,
        });
    }
    // Scale b to integers so the basis solve stays in integer columns.
    let lcm = b.iter().fold(BigInt::one(), |acc, x| {
        num_integer::Integer::lcm(&acc, x.denom())
    });
    let rhs: Vec<BigInt> = b.iter().map(|x| (x * &lcm).to_integer()).collect();
    let columns: Vec<Vec<BigInt>> = a
        .columns()
        .into_iter()
        .map(|c| c.into_iter().map(BigInt::from).collect())
        .collect();
    let mut vertices: Vec<Vec<Rational>> = Vec::new();
    for set in (0..n).combinations(rank) {
        if a.submatrix(&(0..a.rows()).collect::<Vec<_>>(), &set).rank() != rank {
            continue;
        }
        let basis: Vec<Vec<BigInt>> = set.iter().map(|&j| columns[j].clone()).collect();
        let Some(coords) = linalg::solve_in_basis(&basis, &rhs) else {
            continue;
        };
        if coords.iter().any(Signed::is_negative) {
            continue;
        }
        let mut z = vec![Rational::zero(); n];
        for (&j, c) in set.iter().zip(coords) {
            z[j] = c / Rational::from_integer(lcm.clone());
        }
        if !vertices.contains(&z) {
            vertices.push(z);
        }
    }
    Ok(vertices)
}

pub fn is_integral(z: &[Rational]) -> bool {
    z.iter().all(Rational::is_integer)
}
