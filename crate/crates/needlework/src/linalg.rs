//! Exact Gaussian elimination, over a finite field and over the
//! rationals. Small dense matrices only; no pivoting heuristics beyond
//! "first nonzero entry wins", which keeps outputs reproducible.

use num::BigRational;
use num::Zero;

use crate::field::{Field, FieldElement};

/// Rank of a matrix over F_q.
pub fn rank(rows: &[Vec<FieldElement>]) -> usize {
    reduce(rows).pivots.len()
}

/// A vector in the null space of the matrix (viewed as a map from
/// column space to row space), or None when the columns are
/// independent. The vector returned is the one that sets the first
/// free column to 1 and every other free column to 0.
pub fn null_space_vector(
    field: &Field,
    rows: &[Vec<FieldElement>],
    n_cols: usize,
) -> Option<Vec<FieldElement>> {
    let echelon = reduce(rows);
    let pivot_cols: Vec<usize> = echelon.pivots.iter().map(|&(_, c)| c).collect();
    let free = (0..n_cols).find(|c| !pivot_cols.contains(c))?;
    let mut x = vec![field.zero(); n_cols];
    x[free] = field.one();
    // Rows are reduced (pivots are 1 and alone in their column), so
    // each pivot variable reads off directly.
    for &(r, c) in echelon.pivots.iter() {
        x[c] = -&echelon.rows[r][free] * &x[free];
    }
    Some(x)
}

struct Echelon {
    rows: Vec<Vec<FieldElement>>,
    // (row, column) of each pivot, in elimination order.
    pivots: Vec<(usize, usize)>,
}

fn reduce(input: &[Vec<FieldElement>]) -> Echelon {
    let mut rows: Vec<Vec<FieldElement>> = input.to_vec();
    let n_cols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..n_cols {
        let Some(src) = (next_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next_row, src);
        let inv = rows[next_row][col].inv();
        for entry in rows[next_row].iter_mut() {
            *entry = &*entry * &inv;
        }
        for r in 0..rows.len() {
            if r != next_row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in 0..n_cols {
                    let delta = &factor * &rows[next_row][c];
                    rows[r][c] = &rows[r][c] - &delta;
                }
            }
        }
        pivots.push((next_row, col));
        next_row += 1;
        if next_row == rows.len() {
            break;
        }
    }
    Echelon { rows, pivots }
}

/// Rank of a matrix over Q, by fraction-exact elimination.
pub fn rank_rational(rows: &[Vec<BigRational>]) -> usize {
    let mut rows: Vec<Vec<BigRational>> = rows.to_vec();
    let n_cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..n_cols {
        let Some(src) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, src);
        let pivot = rows[rank][col].clone();
        for entry in rows[rank].iter_mut() {
            *entry = &*entry / &pivot;
        }
        for r in rank + 1..rows.len() {
            if !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in col..n_cols {
                    let delta = &factor * &rows[rank][c];
                    rows[r][c] = &rows[r][c] - &delta;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Rank of a matrix over Q(i), entries as (real, imaginary) pairs,
/// by fraction-exact elimination.
pub fn rank_complex_rational(rows: &[Vec<(BigRational, BigRational)>]) -> usize {
    type C = (BigRational, BigRational);
    fn is_zero(z: &C) -> bool {
        z.0.is_zero() && z.1.is_zero()
    }
    fn mul(a: &C, b: &C) -> C {
        (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
    }
    fn sub(a: &C, b: &C) -> C {
        (&a.0 - &b.0, &a.1 - &b.1)
    }
    fn inv(z: &C) -> C {
        let norm = &z.0 * &z.0 + &z.1 * &z.1;
        (&z.0 / &norm, -(&z.1 / &norm))
    }

    let mut rows: Vec<Vec<C>> = rows.to_vec();
    let n_cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..n_cols {
        let Some(src) = (rank..rows.len()).find(|&r| !is_zero(&rows[r][col])) else {
            continue;
        };
        rows.swap(rank, src);
        let pivot_inv = inv(&rows[rank][col].clone());
        for entry in rows[rank].iter_mut() {
            *entry = mul(entry, &pivot_inv);
        }
        for r in rank + 1..rows.len() {
            if !is_zero(&rows[r][col]) {
                let factor = rows[r][col].clone();
                for c in col..n_cols {
                    let delta = mul(&factor, &rows[rank][c]);
                    rows[r][c] = sub(&rows[r][c], &delta);
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}
