//! Spectral norms of qubit operators.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operator::{sectors, QubitOperator, C64};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 100_000;
const RESTARTS: u64 = 4;
const SEED: u64 = 0x5eed_0fa1;

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) -> f64 {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// `‖A‖` by power iteration on `A†A` from a seeded random start.
///
/// Stops once the Rayleigh residual `‖Bv − ρv‖ ≤ tol·ρ`; a stalled run is
/// restarted from a fresh random vector before giving up.
pub fn exact_spectral_norm(op: &QubitOperator, tol: f64) -> Result<f64> {
    if op.nnz() == 0 {
        return Ok(0.0);
    }
    let adj = op.adjoint();
    let apply = |v: &[C64]| adj.matvec(&op.matvec(v));
    let dim = op.dim();
    for restart in 0..RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + restart);
        let mut v: Vec<C64> = (0..dim).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        normalize(&mut v);
        let per_run = MAX_ITERATIONS / RESTARTS as usize;
        for _ in 0..per_run {
            let mut w = apply(&v);
            let rho: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
            let resid = w.iter().zip(&v).map(|(b, a)| (b - a * rho).norm_sqr()).sum::<f64>().sqrt();
            if rho <= 0.0 {
                break;
            }
            if resid <= tol * rho {
                return Ok(rho.sqrt());
            }
            if normalize(&mut w) == 0.0 {
                return Ok(0.0);
            }
            v = w;
        }
    }
    Err(Error::NoConvergence(MAX_ITERATIONS))
}

/// Largest singular value of a dense complex matrix.
pub fn dense_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let tol = 1e-12 * (1.0 + m.iter().map(|x| x.norm()).fold(0.0, f64::max));
    let herm = (m - m.adjoint()).iter().all(|x| x.norm() <= tol);
    if herm {
        hermitian_eigenvalues(m).iter().fold(0.0f64, |a, x| a.max(x.abs()))
    } else {
        // ‖A‖² is the top eigenvalue of A†A; cheaper than a complex SVD
        let g = m.adjoint() * m;
        hermitian_eigenvalues(&g).iter().fold(0.0f64, |a, &x| a.max(x)).max(0.0).sqrt()
    }
}

fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    if m.iter().all(|x| x.im == 0.0) {
        m.map(|x| x.re).symmetric_eigenvalues().iter().copied().collect()
    } else {
        m.symmetric_eigenvalues().iter().copied().collect()
    }
}

/// Eigenvalues and eigenvectors of a Hermitian matrix, using the faster real
/// solver when every entry is real.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    if m.iter().all(|x| x.im == 0.0) {
        let e = SymmetricEigen::new(m.map(|x| x.re));
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors.map(|x| C64::new(x, 0.0)))
    } else {
        let e = SymmetricEigen::new(m.clone());
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    }
}

/// `‖A‖` as the largest dense block norm over the sectors of a conserved
/// key. Fails if `A` couples different sectors.
pub fn sector_spectral_norm(op: &QubitOperator, key: impl Fn(usize) -> usize + Copy) -> Result<f64> {
    if !op.preserves(key) {
        return Err(Error::InvalidParameter("operator does not conserve the sector key".into()));
    }
    Ok(sectors(op.n_qubits(), key)
        .iter()
        .map(|(_, basis)| dense_norm(&op.restrict(basis)))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::operator::{particle_number_key, spin_sector_key};

    #[test]
    fn identity_has_unit_norm() {
        for n in [1, 3, 6] {
            let id = QubitOperator::identity(n).unwrap();
            assert!((exact_spectral_norm(&id, DEFAULT_TOL).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_hermitian_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut t = Vec::new();
        for r in 0..8 {
            for c in r..8 {
                let v = if r == c {
                    C64::new(rng.random::<f64>() - 0.5, 0.0)
                } else {
                    C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                };
                t.push((r, c, v));
                if r != c {
                    t.push((c, r, v.conj()));
                }
            }
        }
        let op = QubitOperator::from_triplets(3, t).unwrap();
        let dense = dense_norm(&op.to_dense().unwrap());
        let power = exact_spectral_norm(&op, DEFAULT_TOL).unwrap();
        assert!((dense - power).abs() <= 1e-8 * dense);
    }

    #[test]
    fn zero_operator() {
        assert_eq!(exact_spectral_norm(&QubitOperator::zeros(4).unwrap(), DEFAULT_TOL).unwrap(), 0.0);
    }

    #[test]
    fn sector_norm_rejects_mixing() {
        let op = QubitOperator::from_triplets(2, vec![(0, 1, C64::new(1.0, 0.0))]).unwrap();
        assert!(sector_spectral_norm(&op, particle_number_key).is_err());
        let d = QubitOperator::diagonal(4, |s| s as f64).unwrap();
        assert_eq!(sector_spectral_norm(&d, spin_sector_key).unwrap(), 15.0);
    }
}
