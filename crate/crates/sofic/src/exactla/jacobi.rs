//! Floating-point spectra of symmetric matrices by the cyclic Jacobi
//! rotation method — the scalable path for dimensions where exact
//! arithmetic is no longer economical, cross-validated against the exact
//! operations at small sizes.

use num_traits::ToPrimitive;

use super::SparseIntMatrix;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Zero-classification tolerance used by callers on the floating path:
/// `dim · 2⁻⁴⁰ · norm_bound`.
pub fn default_zero_tol(dim: usize, norm_bound: &num_bigint::BigInt) -> f64 {
    dim as f64 * (0.5f64).powi(40) * norm_bound.to_f64().unwrap_or(f64::MAX)
}

/// All eigenvalues of a symmetric matrix, ascending; values with
/// `|λ| ≤ zero_tol` are snapped to exactly 0.
pub fn float_spectrum(a: &SparseIntMatrix, zero_tol: f64) -> Result<Vec<f64>> {
    a.check_symmetric()?;
    let n = a.rows();
    let mut m = vec![vec![0f64; n]; n];
    for (r, c, v) in a.iter() {
        m[r][c] = v
            .to_f64()
            .ok_or(Error::Overflow("matrix entry does not fit in f64"))?;
    }

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0f64;
        let mut total = 0f64;
        for p in 0..n {
            total += m[p][p] * m[p][p];
            for q in p + 1..n {
                off += 2.0 * m[p][q] * m[p][q];
            }
        }
        total += off;
        if off.sqrt() <= 1e-13 * total.sqrt().max(1.0) {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(format!(
            "Jacobi sweeps exceeded {MAX_SWEEPS} on a {n}×{n} matrix"
        )));
    }

    let mut eig: Vec<f64> = (0..n)
        .map(|i| if m[i][i].abs() <= zero_tol { 0.0 } else { m[i][i] })
        .collect();
    eig.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(eig)
}

/// One Jacobi rotation annihilating the (p,q) entry.
fn rotate(m: &mut [Vec<f64>], p: usize, q: usize) {
    let apq = m[p][q];
    if apq == 0.0 {
        return;
    }
    let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = m.len();
    for i in 0..n {
        if i == p || i == q {
            continue;
        }
        let aip = m[i][p];
        let aiq = m[i][q];
        m[i][p] = c * aip - s * aiq;
        m[p][i] = m[i][p];
        m[i][q] = s * aip + c * aiq;
        m[q][i] = m[i][q];
    }
    m[p][p] -= t * apq;
    m[q][q] += t * apq;
    m[p][q] = 0.0;
    m[q][p] = 0.0;
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::super::{cycle_laplacian, det_star, ln_bigint};
    use super::*;

    #[test]
    fn identity_and_cycle_spectra() {
        let id = SparseIntMatrix::identity(3);
        assert_eq!(float_spectrum(&id, 1e-12).unwrap(), vec![1.0, 1.0, 1.0]);

        let d = cycle_laplacian(4);
        let eig = float_spectrum(&d, 1e-10).unwrap();
        let want = [0.0, 2.0, 2.0, 4.0];
        for (e, w) in eig.iter().zip(want) {
            assert!((e - w).abs() < 1e-10, "got {eig:?}");
        }
        assert_eq!(eig[0], 0.0, "kernel eigenvalue snapped to zero");
        assert!(float_spectrum(&SparseIntMatrix::new(2, 3), 0.0).is_err());
    }

    #[test]
    fn default_tolerance_scales() {
        let tol = default_zero_tol(400, &BigInt::from(20));
        assert!(tol > 0.0 && tol < 1e-8);
        assert!(default_zero_tol(800, &BigInt::from(20)) > tol);
    }

    #[test]
    fn log_products_match_det_star_on_random_psd() {
        // BᵀB for random integer B is symmetric PSD; the exact oracle for the
        // product of nonzero eigenvalues is det_star.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..5 {
            let n = 20;
            let b = SparseIntMatrix::from_triplets(
                n,
                n,
                (0..n * n).map(|i| (i / n, i % n, BigInt::from(rng.gen_range(-3i64..=3)))),
            )
            .unwrap();
            let g = b.transpose().mul(&b).unwrap();
            let tol = default_zero_tol(n, &g.norm_bound());
            let eig = float_spectrum(&g, tol).unwrap();
            assert!(eig.iter().all(|&l| l >= 0.0), "PSD spectrum, trial {trial}");
            let float_ln: f64 = eig.iter().filter(|&&l| l > 0.0).map(|l| l.ln()).sum();
            let exact_ln = ln_bigint(&det_star(&g).unwrap()).unwrap();
            assert!(
                (float_ln - exact_ln).abs() < 1e-8 * exact_ln.abs().max(1.0),
                "trial {trial}: float {float_ln} vs exact {exact_ln}"
            );
        }
    }
}
