//! Exact Sylvester inertia of symmetric integer matrices at a rational
//! shift, via symmetric congruence elimination in rational arithmetic with
//! 1×1 and antidiagonal 2×2 pivots.

use num_traits::{Signed, Zero};

use super::SparseIntMatrix;
use crate::{Rat, Result};

/// Counts of eigenvalues of `a` that are `< λ`, `= λ`, `> λ`, exactly.
///
/// Works on `a − λI` by congruence (which preserves signs of eigenvalues,
/// not their values): a nonzero diagonal entry serves as a 1×1 pivot whose
/// sign is recorded; when the whole remaining diagonal is zero, a nonzero
/// off-diagonal entry gives a 2×2 pivot `[[0,a],[a,0]]` with eigenvalues
/// `±a`, contributing one eigenvalue of each sign; an all-zero remainder is
/// the kernel of the shifted matrix.
pub fn inertia(a: &SparseIntMatrix, lambda: &Rat) -> Result<(usize, usize, usize)> {
    a.check_symmetric()?;
    let n = a.rows();
    let mut m: Vec<Vec<Rat>> = a
        .to_dense()
        .into_iter()
        .map(|row| row.into_iter().map(Rat::from_integer).collect())
        .collect();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= lambda;
    }

    let (mut n_minus, mut n_zero, mut n_plus) = (0usize, 0usize, 0usize);
    let mut k = 0usize;
    while k < n {
        if let Some(i) = (k..n).find(|&i| !m[i][i].is_zero()) {
            sym_swap(&mut m, k, i);
            let d = m[k][k].clone();
            if d.is_positive() {
                n_plus += 1;
            } else {
                n_minus += 1;
            }
            for r in k + 1..n {
                if m[r][k].is_zero() {
                    continue;
                }
                let f = &m[r][k] / &d;
                for c in k + 1..n {
                    let s = &f * &m[k][c];
                    m[r][c] -= s;
                }
            }
            k += 1;
        } else if let Some((i, j)) = first_off_diagonal(&m, k) {
            sym_swap(&mut m, k, i);
            sym_swap(&mut m, k + 1, j);
            n_plus += 1;
            n_minus += 1;
            let a = m[k][k + 1].clone();
            for r in k + 2..n {
                if m[r][k].is_zero() && m[r][k + 1].is_zero() {
                    continue;
                }
                for c in k + 2..n {
                    let s = (&m[r][k] * &m[k + 1][c] + &m[r][k + 1] * &m[k][c]) / &a;
                    m[r][c] -= s;
                }
            }
            k += 2;
        } else {
            n_zero += n - k;
            break;
        }
    }
    Ok((n_minus, n_zero, n_plus))
}

fn sym_swap(m: &mut [Vec<Rat>], i: usize, j: usize) {
    if i == j {
        return;
    }
    m.swap(i, j);
    for row in m.iter_mut() {
        row.swap(i, j);
    }
}

/// First nonzero strictly-off-diagonal position in the trailing block.
fn first_off_diagonal(m: &[Vec<Rat>], k: usize) -> Option<(usize, usize)> {
    let n = m.len();
    for i in k..n {
        for j in i + 1..n {
            if !m[i][j].is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}
