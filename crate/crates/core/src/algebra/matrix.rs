//! Exact rank of rational matrices.
//!
//! Rows are scaled to integers and reduced by Bareiss fraction-free
//! elimination, so every division is exact and no threshold enters the
//! rank decision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::scalar::Scalar;

/// Rank over the rationals of a rectangular matrix. The empty matrix has
/// rank zero.
pub fn exact_rank(rows: &[Vec<Scalar>]) -> usize {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return 0;
    }
    debug_assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix");

    // Clear denominators row by row; row scaling preserves rank.
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let mut lcm = BigInt::one();
            for entry in row {
                lcm = lcm.lcm(entry.denom());
            }
            row.iter()
                .map(|entry| entry.numer() * (&lcm / entry.denom()))
                .collect()
        })
        .collect();

    let mut rank = 0;
    let mut pivot_row = 0;
    let mut prev = BigInt::one();
    for col in 0..ncols {
        if pivot_row == nrows {
            break;
        }
        let Some(found) = (pivot_row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, found);
        let pivot = m[pivot_row][col].clone();
        for r in pivot_row + 1..nrows {
            for c in col + 1..ncols {
                let value = (&m[r][c] * &pivot - &m[r][col] * &m[pivot_row][c]) / &prev;
                m[r][c] = value;
            }
            m[r][col] = BigInt::zero();
        }
        prev = pivot;
        pivot_row += 1;
        rank += 1;
    }
    rank
}

/// Exact rank of an integer matrix given as machine ints; test convenience.
pub fn exact_rank_i64(rows: &[Vec<i64>]) -> usize {
    let converted: Vec<Vec<Scalar>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| super::scalar::scalar_int(v)).collect())
        .collect();
    exact_rank(&converted)
}
