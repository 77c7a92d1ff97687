//! Exact linear algebra over the integers and rationals.
//!
//! The centerpiece is [`det_star`]: the product of the *nonzero* eigenvalues
//! of a symmetric positive-semidefinite integer matrix, always a positive
//! integer, extracted as the lowest nonzero coefficient of the exact
//! characteristic polynomial.  Supporting cast:
//!
//! * [`rank`] / [`det_bareiss`] — fraction-free Gaussian elimination;
//! * [`charpoly`] — deterministic multi-modular Hessenberg reduction with a
//!   rigorous Hadamard-style coefficient bound (no probabilistic shortcuts);
//! * [`inertia`] — exact Sylvester inertia via rational symmetric congruence,
//!   counting eigenvalues below / at / above any rational threshold;
//! * [`float_spectrum`] — a self-contained cyclic Jacobi eigensolver for the
//!   dimensions where exact arithmetic is no longer economical.
//!
//! The exact path is intended for dimension ≤ 200; beyond that callers switch
//! to the floating path with [`default_zero_tol`].

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::{Error, Result};

mod charpoly;
mod inertia;
mod jacobi;
mod rank;

pub use charpoly::{charpoly, det_star};
pub use inertia::inertia;
pub use jacobi::{default_zero_tol, float_spectrum};
pub use rank::{det_bareiss, rank};

/// Sparse integer matrix with arbitrary-precision entries.
///
/// Stored entries are always nonzero; assigning zero removes the entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

/// Sparsity/magnitude profile: `l_row`/`l_col` are the maximum numbers of
/// nonzeros in any row/column, `max_abs` the largest entry magnitude.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixProfile {
    pub l_row: usize,
    pub l_col: usize,
    pub max_abs: BigInt,
}

impl SparseIntMatrix {
    pub fn new(rows: usize, cols: usize) -> SparseIntMatrix {
        SparseIntMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> SparseIntMatrix {
        let mut m = SparseIntMatrix::new(n, n);
        for i in 0..n {
            m.entries.insert((i, i), BigInt::from(1));
        }
        m
    }

    /// Builds from (row, col, value) triplets; duplicates are summed, zero
    /// sums dropped.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<SparseIntMatrix>
    where
        I: IntoIterator<Item = (usize, usize, BigInt)>,
    {
        let mut m = SparseIntMatrix::new(rows, cols);
        for (r, c, v) in triplets {
            m.add_at(r, c, v)?;
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    fn check_bounds(&self, r: usize, c: usize) -> Result<()> {
        if r >= self.rows || c >= self.cols {
            return Err(Error::Dimension(format!(
                "index ({r},{c}) outside {}×{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) -> Result<()> {
        self.check_bounds(r, c)?;
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
        Ok(())
    }

    /// Adds `v` to the entry at (r, c), removing it if the sum is zero.
    pub fn add_at(&mut self, r: usize, c: usize, v: BigInt) -> Result<()> {
        self.check_bounds(r, c)?;
        if v.is_zero() {
            return Ok(());
        }
        let slot = self.entries.entry((r, c)).or_insert_with(BigInt::zero);
        *slot += v;
        if slot.is_zero() {
            self.entries.remove(&(r, c));
        }
        Ok(())
    }

    /// Iterates stored (nonzero) entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn transpose(&self) -> SparseIntMatrix {
        let mut t = SparseIntMatrix::new(self.cols, self.rows);
        for (r, c, v) in self.iter() {
            t.entries.insert((c, r), v.clone());
        }
        t
    }

    pub fn mul(&self, rhs: &SparseIntMatrix) -> Result<SparseIntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut rhs_rows: Vec<Vec<(usize, &BigInt)>> = vec![Vec::new(); rhs.rows];
        for (r, c, v) in rhs.iter() {
            rhs_rows[r].push((c, v));
        }
        let mut acc: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for (i, k, a) in self.iter() {
            for &(j, b) in &rhs_rows[k] {
                let slot = acc.entry((i, j)).or_insert_with(BigInt::zero);
                *slot += a * b;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(SparseIntMatrix { rows: self.rows, cols: rhs.cols, entries: acc })
    }

    /// Errors with the offending index pair unless the matrix is symmetric.
    pub fn check_symmetric(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "{}×{} matrix cannot be symmetric",
                self.rows, self.cols
            )));
        }
        for (r, c, v) in self.iter() {
            if self.entries.get(&(c, r)) != Some(v) {
                return Err(Error::NotSymmetric(r, c));
            }
        }
        Ok(())
    }

    pub fn profile(&self) -> MatrixProfile {
        let mut per_row = vec![0usize; self.rows];
        let mut per_col = vec![0usize; self.cols];
        let mut max_abs = BigUint::zero();
        for (r, c, v) in self.iter() {
            per_row[r] += 1;
            per_col[c] += 1;
            let mag = v.magnitude();
            if *mag > max_abs {
                max_abs = mag.clone();
            }
        }
        MatrixProfile {
            l_row: per_row.iter().copied().max().unwrap_or(0),
            l_col: per_col.iter().copied().max().unwrap_or(0),
            max_abs: BigInt::from(max_abs),
        }
    }

    /// `L·M` where `L = max(l_row, l_col)` and `M = max_abs`; dominates the
    /// operator norm of the matrix.
    pub fn norm_bound(&self) -> BigInt {
        let p = self.profile();
        BigInt::from(p.l_row.max(p.l_col)) * p.max_abs
    }

    pub(crate) fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (r, c, v) in self.iter() {
            d[r][c] = v.clone();
        }
        d
    }
}

/// Natural logarithm of a positive big integer, accurate to the precision of
/// `f64` (top 53 bits of mantissa plus an exact power-of-two shift).
pub fn ln_bigint(x: &BigInt) -> Result<f64> {
    if !x.is_positive() {
        return Err(Error::BadArgument(format!("ln of non-positive integer {x}")));
    }
    let bits = x.bits();
    if bits <= 53 {
        Ok(x.to_f64().expect("fits in f64").ln())
    } else {
        let shift = bits - 53;
        let mant = (x >> shift).to_f64().expect("53-bit mantissa");
        Ok(mant.ln() + shift as f64 * std::f64::consts::LN_2)
    }
}

/// Circulant Laplacian of the n-cycle (2 on the diagonal, −1 on the two
/// neighbors); shared by several tests and benchmarks.
#[cfg(test)]
pub(crate) fn cycle_laplacian(n: usize) -> SparseIntMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, BigInt::from(2)));
        t.push((i, (i + 1) % n, BigInt::from(-1)));
        t.push(((i + 1) % n, i, BigInt::from(-1)));
    }
    SparseIntMatrix::from_triplets(n, n, t).unwrap()
}
