//! Finite models of sofic approximations.
//!
//! The crate computes with the finite objects that witness soficity and its
//! consequences:
//!
//! * [`groups`] — marked groups as evaluable oracles (free groups, lattices,
//!   finite quotients), Cayley balls, and the dyadic relation metric on
//!   marked groups.
//! * [`approx`] — finite labeled graphs approximating a marked group: tori,
//!   Schreier graphs of finite quotients, random permutation models, and the
//!   detection of the *good set* of vertices whose balls match the group's.
//! * [`permcalc`] — the cycle-statistics calculus on permutations: `#_t`
//!   censuses, disjoint-union and product powers, realization of prescribed
//!   cycle distributions, conjugators, covering closures, and the composition
//!   inequality.
//! * [`witness`] — permutation witnesses (almost multiplicative, almost
//!   fixed-point-free maps into symmetric groups), their verification, and
//!   power amplification.
//! * [`exactla`] — exact integer/rational linear algebra: fraction-free rank,
//!   integer characteristic polynomials, `det*` (product of nonzero
//!   eigenvalues), symmetric inertia, and a floating Jacobi fallback.
//! * [`l2`] — integer group-ring matrices, their pullback to approximation
//!   graphs, and normalized spectral invariants (kernel dimension,
//!   `ln det*`, spectral density, trace polynomials).
//! * [`amenact`] — finite actions and almost-actions: Følner-set search and
//!   verification, error sets, error propagation, and paradoxicality
//!   certificates via (2,1)-matchings.
//! * [`io`] — JSON and plain-text formats for all of the above.

// Dense kernels index matrices as m[i][j]; iterator rewrites obscure the math.
#![allow(clippy::needless_range_loop)]

pub mod amenact;
pub mod approx;
mod error;
pub mod exactla;
pub mod groups;
pub mod io;
pub mod l2;
pub mod permcalc;
pub mod witness;

pub use error::{Error, Result};

/// Exact rational scalar used for all quality ratios and spectral thresholds.
pub type Rat = num_rational::BigRational;

/// Convenience constructor for small rationals in tests and CLI code.
pub fn rat(num: i64, den: i64) -> Rat {
    use num_bigint::BigInt;
    Rat::new(BigInt::from(num), BigInt::from(den))
}
