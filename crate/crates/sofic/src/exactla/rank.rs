//! Fraction-free Gaussian elimination (Bareiss): exact rank over the
//! rationals and exact determinant, with full pivoting so zero pivots never
//! stop the elimination early.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::SparseIntMatrix;
use crate::{Error, Result};

/// Exact rank over the rationals.
pub fn rank(a: &SparseIntMatrix) -> usize {
    bareiss(a.to_dense()).rank
}

/// Exact determinant of a square matrix by fraction-free elimination.
pub fn det_bareiss(a: &SparseIntMatrix) -> Result<BigInt> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "determinant of non-square {}×{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let out = bareiss(a.to_dense());
    if out.rank < a.rows() {
        Ok(BigInt::zero())
    } else {
        Ok(out.det)
    }
}

struct Elimination {
    rank: usize,
    /// Valid (up to the tracked swap sign) only when the matrix is square and
    /// of full rank; the caller handles the singular case.
    det: BigInt,
}

/// One-step fraction-free elimination: every division below is exact by
/// Sylvester's determinant identity, so all intermediate values stay integral
/// and each post-step pivot is a minor of the (permuted) input.
fn bareiss(mut m: Vec<Vec<BigInt>>) -> Elimination {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut prev = BigInt::one();
    let mut sign = 1i8;
    let mut rank = 0usize;

    for k in 0..rows.min(cols) {
        // Full pivoting on the smallest nonzero magnitude keeps the integer
        // growth down without affecting exactness.
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if m[i][j].is_zero() {
                    continue;
                }
                let better = match pivot {
                    None => true,
                    Some((pi, pj)) => m[i][j].magnitude() < m[pi][pj].magnitude(),
                };
                if better {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        if pi != k {
            m.swap(pi, k);
            sign = -sign;
        }
        if pj != k {
            for row in m.iter_mut() {
                row.swap(pj, k);
            }
            sign = -sign;
        }
        for i in k + 1..rows {
            for j in k + 1..cols {
                let num = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
        rank += 1;
    }

    let det = if sign < 0 { -prev } else { prev };
    Elimination { rank, det }
}
