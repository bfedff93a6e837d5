//! Exact rational and integer linear algebra helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Reduced row echelon form. Returns the reduced rows and the pivot column of
/// each nonzero row.
pub(crate) fn rref(
    mut rows: Vec<Vec<BigRational>>,
    cols: usize,
) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row).take(cols) {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (rows, pivots)
}

/// Primitive integer basis of the rational null space `{x | A x = 0}` of a
/// `rows`x`cols` matrix.
pub(crate) fn rational_kernel(a: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let rows: Vec<Vec<BigRational>> = a
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    let (reduced, pivots) = rref(rows, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![BigRational::zero(); cols];
            v[fc] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -reduced[row][fc].clone();
            }
            primitive(&v)
        })
        .collect()
}

/// Scales a rational vector to the primitive integer vector on the same ray.
pub(crate) fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// Integer basis of the lattice `{x in Z^n | K x = 0}` for a full-row-rank
/// integer matrix `K` with `n` columns. Uses unimodular column operations
/// `K U = [L | 0]`; the trailing columns of `U` span the kernel.
pub(crate) fn integer_kernel(k: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let mut work: Vec<Vec<BigInt>> = k.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let col_op = |m: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
        for row in m.iter_mut() {
            let delta = &row[src] * q;
            row[dst] -= delta;
        }
    };
    let col_swap = |m: &mut Vec<Vec<BigInt>>, a: usize, b: usize| {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    };
    for (i, p) in (0..work.len()).zip(0..n) {
        loop {
            let smallest = (p..n)
                .filter(|&j| !work[i][j].is_zero())
                .min_by(|&a, &b| work[i][a].abs().cmp(&work[i][b].abs()));
            let Some(s) = smallest else {
                break;
            };
            col_swap(&mut work, p, s);
            col_swap(&mut u, p, s);
            let mut done = true;
            for j in p + 1..n {
                if work[i][j].is_zero() {
                    continue;
                }
                let q = work[i][j].div_floor(&work[i][p]);
                col_op(&mut work, j, p, &q);
                col_op(&mut u, j, p, &q);
                if !work[i][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
    }
    let rank = k.len();
    (rank..n)
        .map(|c| u.iter().map(|row| row[c].clone()).collect())
        .collect()
}

/// Solves `B c = a` for a full-column-rank integer basis `B` (given as
/// columns), returning `None` if `a` is outside the rational span.
pub(crate) fn solve_in_basis(basis: &[Vec<BigInt>], a: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let r = basis.len();
    let rows: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            basis
                .iter()
                .map(|b| BigRational::from_integer(b[i].clone()))
                .chain(std::iter::once(BigRational::from_integer(a[i].clone())))
                .collect()
        })
        .collect();
    let (reduced, pivots) = rref(rows, r + 1);
    if pivots.contains(&r) {
        return None;
    }
    let mut c = vec![BigRational::zero(); r];
    for (row, &pc) in pivots.iter().enumerate() {
        c[pc] = reduced[row][r].clone();
    }
    Some(c)
}
