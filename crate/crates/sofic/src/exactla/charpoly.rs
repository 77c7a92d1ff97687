//! Exact characteristic polynomial by deterministic multi-modular
//! computation, and `det_star` on top of it.
//!
//! Strategy: a rigorous a-priori bound `B = Π_i (1 + ⌈‖row_i‖₂⌉)` dominates
//! every coefficient of `det(xI − A)` (each coefficient is a signed sum of
//! principal minors; Hadamard's inequality bounds the sum of all k×k minors
//! by the k-th elementary symmetric polynomial of the row norms, hence by
//! the product above).  The polynomial is then computed modulo enough 62-bit
//! primes that their product exceeds `2B`, via Hessenberg reduction over each
//! prime field, and recombined by the Chinese remainder theorem with a
//! symmetric lift.  Reduction mod p commutes with the characteristic
//! polynomial, so every prime is usable — no "unlucky prime" handling and no
//! probabilistic verification step is needed.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::SparseIntMatrix;
use crate::{Error, Result};

/// Coefficients of `det(xI − A)` in ascending degree order
/// (`c[0] + c[1]x + … + c[n]xⁿ`, with `c[n] = 1`).
pub fn charpoly(a: &SparseIntMatrix) -> Result<Vec<BigInt>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "characteristic polynomial of non-square {}×{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(vec![BigInt::one()]);
    }

    let bound = coeff_bound(a);
    let target: BigUint = &bound << 1;

    let mut primes = PrimeGen::new();
    let mut modulus = BigUint::one();
    let mut residues: Vec<BigUint> = vec![BigUint::zero(); n + 1];

    while modulus <= target {
        let p = primes.next_prime();
        let cp = charpoly_mod(a, p);
        if modulus.is_one() {
            for (slot, &c) in residues.iter_mut().zip(&cp) {
                *slot = BigUint::from(c);
            }
        } else {
            let m_mod_p = (&modulus % p).to_u64().expect("residue fits u64");
            let inv = inv_mod(m_mod_p, p);
            for (slot, &c) in residues.iter_mut().zip(&cp) {
                let r = (&*slot % p).to_u64().expect("residue fits u64");
                let t = mul_mod(sub_mod(c, r, p), inv, p);
                *slot += &modulus * t;
            }
        }
        modulus *= p;
    }

    let coeffs: Vec<BigInt> = residues
        .into_iter()
        .map(|r| {
            if &r << 1 > modulus {
                BigInt::from(r) - BigInt::from(modulus.clone())
            } else {
                BigInt::from(r)
            }
        })
        .collect();
    debug_assert!(coeffs[n].is_one(), "characteristic polynomial must be monic");
    Ok(coeffs)
}

/// Product of the nonzero eigenvalues of a symmetric positive-semidefinite
/// integer matrix: the absolute value of the lowest nonzero coefficient of
/// the characteristic polynomial.  Always a positive integer; the zero matrix
/// yields the empty product 1.
///
/// Positive semidefiniteness is certified, not assumed: a real-rooted monic
/// polynomial has all roots ≥ 0 exactly when its coefficients alternate in
/// sign ((−1)^{n−j} c_j ≥ 0 for all j), and symmetry guarantees real roots.
pub fn det_star(a: &SparseIntMatrix) -> Result<BigInt> {
    a.check_symmetric()?;
    let cp = charpoly(a)?;
    let n = cp.len() - 1;
    for (j, c) in cp.iter().enumerate() {
        let signed_ok = if (n - j) % 2 == 0 { !c.is_negative() } else { !c.is_positive() };
        if !signed_ok {
            return Err(Error::NotPsd);
        }
    }
    let j = cp.iter().position(|c| !c.is_zero()).expect("monic polynomial");
    Ok(cp[j].abs())
}

/// `Π_i (1 + ⌈‖row_i‖₂⌉)` — dominates every charpoly coefficient.
fn coeff_bound(a: &SparseIntMatrix) -> BigUint {
    let mut row_sq = vec![BigUint::zero(); a.rows()];
    for (r, _, v) in a.iter() {
        let m = v.magnitude();
        row_sq[r] += m * m;
    }
    let mut bound = BigUint::one();
    for sq in row_sq {
        bound *= ceil_sqrt(&sq) + 1u32;
    }
    bound
}

fn ceil_sqrt(x: &BigUint) -> BigUint {
    let s = x.sqrt();
    if &(&s * &s) == x {
        s
    } else {
        s + 1u32
    }
}

// ----- arithmetic over a 62-bit prime field -------------------------------

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b; // both < p < 2^62, no overflow
    if s >= p {
        s - p
    } else {
        s
    }
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller–Rabin, valid for all u64.
fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Yields distinct primes descending from 2⁶², largest first.
struct PrimeGen {
    next_candidate: u64,
}

impl PrimeGen {
    fn new() -> PrimeGen {
        PrimeGen { next_candidate: (1u64 << 62) - 1 }
    }

    fn next_prime(&mut self) -> u64 {
        loop {
            let c = self.next_candidate;
            self.next_candidate -= 2;
            if is_prime_u64(c) {
                return c;
            }
        }
    }
}

// ----- characteristic polynomial over one prime field ---------------------

/// Ascending coefficients of `det(xI − A) mod p`.
fn charpoly_mod(a: &SparseIntMatrix, p: u64) -> Vec<u64> {
    let n = a.rows();
    let p_big = BigInt::from(p);
    let mut m = vec![vec![0u64; n]; n];
    for (r, c, v) in a.iter() {
        m[r][c] = v.mod_floor(&p_big).to_u64().expect("residue fits u64");
    }
    hessenberg_mod(&mut m, p);

    // p_k = charpoly of the leading k×k block, by expansion along the last
    // column of the Hessenberg form:
    //   p_k = (x − m[k-1][k-1]) p_{k-1}
    //         − Σ_{i=0}^{k-2} m[i][k-1] · (Π_{j=i+1}^{k-1} m[j][j-1]) · p_i.
    let mut polys: Vec<Vec<u64>> = Vec::with_capacity(n + 1);
    polys.push(vec![1]);
    for k in 1..=n {
        let mut q = vec![0u64; k + 1];
        let diag = m[k - 1][k - 1];
        for (d, &c) in polys[k - 1].iter().enumerate() {
            q[d + 1] = add_mod(q[d + 1], c, p);
            q[d] = sub_mod(q[d], mul_mod(diag, c, p), p);
        }
        let mut subdiag_prod = 1u64;
        for i in (0..k.saturating_sub(1)).rev() {
            subdiag_prod = mul_mod(subdiag_prod, m[i + 1][i], p);
            if subdiag_prod == 0 {
                break;
            }
            let coef = mul_mod(m[i][k - 1], subdiag_prod, p);
            if coef == 0 {
                continue;
            }
            for (d, &c) in polys[i].iter().enumerate() {
                q[d] = sub_mod(q[d], mul_mod(coef, c, p), p);
            }
        }
        polys.push(q);
    }
    polys.pop().expect("n ≥ 1")
}

/// In-place reduction to upper Hessenberg form by similarity transformations
/// over the field with p elements.
fn hessenberg_mod(m: &mut [Vec<u64>], p: u64) {
    let n = m.len();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let Some(piv) = (k + 1..n).find(|&r| m[r][k] != 0) else { continue };
        if piv != k + 1 {
            m.swap(piv, k + 1);
            for row in m.iter_mut() {
                row.swap(piv, k + 1);
            }
        }
        let inv = inv_mod(m[k + 1][k], p);
        for i in k + 2..n {
            if m[i][k] == 0 {
                continue;
            }
            let f = mul_mod(m[i][k], inv, p);
            // Row op R_i ← R_i − f·R_{k+1}, compensated by the column op
            // C_{k+1} ← C_{k+1} + f·C_i to keep the matrix similar.
            for j in k..n {
                let s = mul_mod(f, m[k + 1][j], p);
                m[i][j] = sub_mod(m[i][j], s, p);
            }
            for r in 0..n {
                let s = mul_mod(f, m[r][i], p);
                m[r][k + 1] = add_mod(m[r][k + 1], s, p);
            }
        }
    }
}
