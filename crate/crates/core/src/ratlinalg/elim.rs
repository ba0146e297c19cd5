//! Fraction-free (Bareiss) elimination.
//!
//! Each row is first scaled by the lcm of its denominators, so elimination
//! runs over integers. The pivot is the first nonzero entry of the current
//! column among the unreduced rows; every division in the update is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{RatMatrix, Rational};

/// Integer rows plus the per-row scale that produced them.
fn integer_rows(m: &RatMatrix) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut rows = Vec::with_capacity(m.rows());
    let mut scales = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let row = m.row(i);
        let lcm = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        rows.push(row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect());
        scales.push(lcm);
    }
    (rows, scales)
}

/// One Bareiss step: eliminate column `col` below `pivot_row`.
fn eliminate(a: &mut [Vec<BigInt>], pivot_row: usize, col: usize, prev: &BigInt) {
    let (head, tail) = a.split_at_mut(pivot_row + 1);
    let pivot = &head[pivot_row];
    let p = &pivot[col];
    for row in tail.iter_mut() {
        let factor = std::mem::take(&mut row[col]);
        if factor.is_zero() {
            // (p·a_ij − 0·a_kj)/prev
            for v in row.iter_mut().skip(col + 1) {
                if !v.is_zero() {
                    *v = (p * &*v) / prev;
                }
            }
        } else {
            for j in col + 1..row.len() {
                row[j] = (p * &row[j] - &factor * &pivot[j]) / prev;
            }
        }
    }
}

pub(super) fn rank(m: &RatMatrix) -> usize {
    let (mut a, _) = integer_rows(m);
    let rows = m.rows();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..m.cols() {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        eliminate(&mut a, rank, col, &prev);
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

pub(super) fn det(m: &RatMatrix) -> Rational {
    let n = m.rows();
    let (mut a, scales) = integer_rows(m);
    let mut prev = BigInt::one();
    let mut negate = false;
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a[i][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            a.swap(col, p);
            negate = !negate;
        }
        eliminate(&mut a, col, col, &prev);
        prev = a[col][col].clone();
    }
    let scale = scales.iter().fold(BigInt::one(), |acc, s| acc * s);
    let d = Rational::new(prev, scale);
    if negate {
        -d
    } else {
        d
    }
}
