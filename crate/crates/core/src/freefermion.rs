//! Norms of free-fermion (quadratic) operators through their coupling
//! matrices.
//!
//! For `H = Σ_ij Q_ij a†_i a_j` in one spin sector with a spectrum symmetric
//! about zero, `‖H‖ = ½‖Q‖₁`. Commutators of quadratic operators are
//! quadratic with coupling `[Q₁, Q₂]`, so nested commutator norms reduce to
//! Schatten one-norms of small dense matrices. Functions named `*_sector`
//! return the one-sector value; the two-sector value is twice that.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lattice::LatticeGraph;

/// Symmetric coupling matrix together with its energy scale (`τ`).
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix {
    pub matrix: DMatrix<f64>,
    pub scale: f64,
}

impl CouplingMatrix {
    pub fn new(matrix: DMatrix<f64>, scale: f64) -> Result<Self> {
        check_symmetric(&matrix)?;
        Ok(Self { matrix, scale })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `scale · ‖M‖₁ / 2`.
    pub fn norm_sector(&self) -> Result<f64> {
        Ok(0.5 * self.scale.abs() * schatten1(&self.matrix)?)
    }

    pub fn norm_two_sector(&self) -> Result<f64> {
        Ok(2.0 * self.norm_sector()?)
    }
}

fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
    }
    let scale = m.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    let asym = asymmetry(m);
    if asym > 1e-9 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Schatten one-norm of a real symmetric matrix, `Σ|λ|`, from its
/// symmetric eigenvalues. Tiny eigenvalues are kept in the sum.
pub fn schatten1(m: &DMatrix<f64>) -> Result<f64> {
    check_symmetric(m)?;
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let sym = (m + m.transpose()) * 0.5;
    Ok(sym.symmetric_eigenvalues().iter().map(|x| x.abs()).sum())
}

/// Schatten one-norm of an arbitrary square matrix (sum of singular values).
/// Used for single commutators, which are antisymmetric.
pub fn schatten1_general(m: &DMatrix<f64>) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
    }
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    Ok(m.singular_values().sum())
}

pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(a.nrows(), b.nrows()));
    }
    Ok(a * b - b * a)
}

/// `[[a, b], c]`.
pub fn nested_commutator(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    commutator(&commutator(a, b)?, c)
}

/// Two-sector hopping norm `‖H_h‖ = τ‖R‖₁`.
pub fn ff_norm(r: &DMatrix<f64>, tau: f64) -> Result<f64> {
    Ok(tau.abs() * schatten1(r)?)
}

/// One-sector hopping norm `τ‖R‖₁ / 2`.
pub fn ff_norm_sector(r: &DMatrix<f64>, tau: f64) -> Result<f64> {
    Ok(0.5 * ff_norm(r, tau)?)
}

/// One-sector `‖[H_A, H_B]‖ = ½‖[A, B]‖₁` for couplings `A`, `B` (scales
/// already folded in).
pub fn ff_comm_norm_sector(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    Ok(0.5 * schatten1_general(&commutator(a, b)?)?)
}

/// One-sector `‖[[H_A, H_B], H_C]‖ = ½‖[[A, B], C]‖₁`.
pub fn ff_nested_norm_sector(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<f64> {
    Ok(0.5 * schatten1(&nested_commutator(a, b, c)?)?)
}

/// Star coupling `S̃` at site `i`: the `N×N` matrix holding only the bonds
/// from `i` to its neighbours, optionally without the bond to `exclude`.
pub fn star_matrix(lattice: &LatticeGraph, i: usize, exclude: Option<usize>) -> Result<DMatrix<f64>> {
    let n = lattice.n_sites();
    if i >= n {
        return Err(Error::InvalidParameter(format!("site {i} out of range")));
    }
    if let Some(j) = exclude {
        if j >= n || !lattice.is_adjacent(i, j) {
            return Err(Error::NotNeighbour { center: i, site: j });
        }
    }
    let mut s = DMatrix::zeros(n, n);
    for &j in lattice.neighbors(i) {
        if Some(j) != exclude {
            s[(i, j)] = 1.0;
            s[(j, i)] = 1.0;
        }
    }
    Ok(s)
}

/// Schatten one-norms of a batch of symmetric matrices.
pub fn schatten1_batch(mats: &[DMatrix<f64>], exec: Execution) -> Result<Vec<f64>> {
    exec.try_map(mats, schatten1)
}

/// Sites within graph distance 2 of `i`, sorted. `[S̃^i, R]` vanishes outside
/// this ball, so its norms can be taken on the restriction.
fn ball2(lattice: &LatticeGraph, i: usize) -> Vec<usize> {
    let mut ball = vec![i];
    for &j in lattice.neighbors(i) {
        ball.push(j);
        ball.extend_from_slice(lattice.neighbors(j));
    }
    ball.sort_unstable();
    ball.dedup();
    ball
}

/// Star and hopping couplings restricted to the distance-2 ball around `i`.
fn local_star(lattice: &LatticeGraph, i: usize, exclude: Option<usize>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if let Some(j) = exclude {
        if j >= lattice.n_sites() || !lattice.is_adjacent(i, j) {
            return Err(Error::NotNeighbour { center: i, site: j });
        }
    }
    let ball = ball2(lattice, i);
    let m = ball.len();
    let r = DMatrix::from_fn(m, m, |a, b| f64::from(u8::from(lattice.is_adjacent(ball[a], ball[b]))));
    let s = DMatrix::from_fn(m, m, |a, b| {
        let (x, y) = (ball[a], ball[b]);
        let on_star = (x == i && Some(y) != exclude) || (y == i && Some(x) != exclude);
        if on_star && lattice.is_adjacent(x, y) {
            1.0
        } else {
            0.0
        }
    });
    Ok((s, r))
}

/// `‖S̃^i‖₁` and `‖[S̃^i, R]‖₁`, optionally with the bond to `exclude` dropped.
pub fn star_pair(lattice: &LatticeGraph, i: usize, exclude: Option<usize>) -> Result<StarNorms> {
    let (s, r) = local_star(lattice, i, exclude)?;
    Ok(StarNorms { star: schatten1(&s)?, star_comm: schatten1_general(&commutator(&s, &r)?)? })
}

/// Per-site star data used by the site-resolved commutator bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StarNorms {
    /// `‖S̃^i‖₁`
    pub star: f64,
    /// `‖[S̃^i, R]‖₁`
    pub star_comm: f64,
}

/// Star norms for every site of the lattice.
pub fn star_norms(lattice: &LatticeGraph, exec: Execution) -> Result<Vec<StarNorms>> {
    let sites: Vec<usize> = (0..lattice.n_sites()).collect();
    exec.try_map(&sites, |&i| star_pair(lattice, i, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_norm() {
        assert!((schatten1(&DMatrix::identity(3, 3)).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(schatten1(&m), Err(Error::NotSymmetric(_))));
        assert!((schatten1_general(&m).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_and_self_commutator() {
        let r = LatticeGraph::ring(6).unwrap().adjacency();
        assert_eq!(ff_norm(&DMatrix::zeros(4, 4), 1.0).unwrap(), 0.0);
        assert!(ff_comm_norm_sector(&r, &r).unwrap() < 1e-12);
    }

    #[test]
    fn exclude_must_be_neighbour() {
        let g = LatticeGraph::ring(6).unwrap();
        assert!(matches!(star_matrix(&g, 0, Some(3)), Err(Error::NotNeighbour { .. })));
        let s = star_matrix(&g, 0, Some(1)).unwrap();
        assert_eq!(s.iter().filter(|&&x| x != 0.0).count(), 2);
    }

    #[test]
    fn local_restriction_matches_full_matrix() {
        let g = LatticeGraph::periodic_hex(4, 4).unwrap();
        let r = g.adjacency();
        for exclude in [None, Some(g.neighbors(5)[0])] {
            let s = star_matrix(&g, 5, exclude).unwrap();
            let local = star_pair(&g, 5, exclude).unwrap();
            assert!((local.star - schatten1(&s).unwrap()).abs() < 1e-10);
            let full = schatten1_general(&commutator(&s, &r).unwrap()).unwrap();
            assert!((local.star_comm - full).abs() < 1e-10);
        }
    }
}
