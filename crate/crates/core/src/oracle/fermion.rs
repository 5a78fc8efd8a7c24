//! Jordan–Wigner matrices of lattice fermion Hamiltonians.
//!
//! Basis index bit `p` is the occupation of mode `p`. Two-spin operators use
//! interleaved spin orbitals (`i↑ = 2i`, `i↓ = 2i + 1`); single-sector
//! operators use one mode per site.

use nalgebra::DMatrix;

use super::operator::{QubitOperator, C64};
use crate::error::{Error, Result};
use crate::lattice::LatticeGraph;
use crate::tiling::{SectionCover, Tile};
use crate::trotterbounds::ModelParams;

pub fn up(i: usize) -> usize {
    2 * i
}

pub fn down(i: usize) -> usize {
    2 * i + 1
}

/// Action of `a†_p a_q` on a basis state: `Some((sign, target))` or `None`.
pub fn hop_action(p: usize, q: usize, s: usize) -> Option<(f64, usize)> {
    if s & (1 << q) == 0 {
        return None;
    }
    if p == q {
        return Some((1.0, s));
    }
    if s & (1 << p) != 0 {
        return None;
    }
    let (lo, hi) = if p < q { (p, q) } else { (q, p) };
    let between = s & (((1usize << hi) - 1) & !((1usize << (lo + 1)) - 1));
    let sign = if between.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    Some((sign, s ^ (1 << q) ^ (1 << p)))
}

/// `a†_p a_q` on `n_modes` modes.
pub fn hop(n_modes: usize, p: usize, q: usize) -> Result<QubitOperator> {
    let t = (0..1usize << n_modes)
        .filter_map(|s| hop_action(p, q, s).map(|(sg, t)| (t, s, C64::new(sg, 0.0))))
        .collect();
    QubitOperator::from_triplets(n_modes, t)
}

/// `Σ_{pq} h_pq a†_p a_q` for a real coupling matrix over `n_modes` modes.
pub fn quadratic(n_modes: usize, h: &DMatrix<f64>) -> Result<QubitOperator> {
    if h.nrows() != n_modes || h.ncols() != n_modes {
        return Err(Error::DimensionMismatch(h.nrows(), n_modes));
    }
    let mut t = Vec::new();
    for s in 0..1usize << n_modes {
        for p in 0..n_modes {
            for q in 0..n_modes {
                let c = h[(p, q)];
                if c == 0.0 {
                    continue;
                }
                if let Some((sg, target)) = hop_action(p, q, s) {
                    t.push((target, s, C64::new(c * sg, 0.0)));
                }
            }
        }
    }
    QubitOperator::from_triplets(n_modes, t)
}

/// `Z_p` eigenvalue on a basis state, `2n_p − 1`.
pub fn z(s: usize, p: usize) -> f64 {
    if s & (1 << p) != 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn n(s: usize, p: usize) -> f64 {
    f64::from(u8::from(s & (1 << p) != 0))
}

/// `Z_p Z_q` on `n_modes` modes.
pub fn zz(n_modes: usize, p: usize, q: usize) -> Result<QubitOperator> {
    QubitOperator::diagonal(n_modes, |s| z(s, p) * z(s, q))
}

/// Pieces of a lattice Hamiltonian that can be requested from
/// [`jw_hamiltonian`].
#[derive(Clone, Debug)]
pub enum Piece<'a> {
    /// `H_h = −τ Σ R_ij a†_iσ a_jσ`
    Hopping,
    /// `H_I = (U/4) Σ Z_i↑ Z_i↓`
    OnSite,
    /// `H_V = (V/4) Σ_bonds Σ_σσ' Z_iσ Z_jσ'`
    NearestNeighbour,
    /// `H_C = H_I + H_V`
    Coulomb,
    /// Unshifted `U Σ n_i↑ n_i↓`.
    OnSiteUnshifted,
    /// Unshifted `V Σ_bonds Σ_σσ' n_iσ n_jσ'`.
    NearestNeighbourUnshifted,
    /// Hopping restricted to section `s` of a cover.
    Section(&'a SectionCover, usize),
    /// Hopping restricted to one placed tile.
    Tile(&'a Tile),
    /// One spin sector of `H_h`, on `N` modes.
    HoppingSector,
}

fn check_modes(n_modes: usize) -> Result<()> {
    if n_modes > super::operator::MAX_QUBITS {
        return Err(Error::SizeLimit(n_modes));
    }
    Ok(())
}

/// Two-spin hopping operator for a site coupling matrix (already scaled).
pub fn spinful_quadratic(n_sites: usize, h: &DMatrix<f64>) -> Result<QubitOperator> {
    let n_modes = 2 * n_sites;
    check_modes(n_modes)?;
    let mut big = DMatrix::zeros(n_modes, n_modes);
    for i in 0..n_sites {
        for j in 0..n_sites {
            big[(up(i), up(j))] = h[(i, j)];
            big[(down(i), down(j))] = h[(i, j)];
        }
    }
    quadratic(n_modes, &big)
}

pub fn jw_hamiltonian(lattice: &LatticeGraph, params: &ModelParams, piece: Piece<'_>) -> Result<QubitOperator> {
    let ns = lattice.n_sites();
    let nm = 2 * ns;
    let edges = lattice.edges();
    match piece {
        Piece::HoppingSector => {
            check_modes(ns)?;
            quadratic(ns, &(lattice.adjacency() * -params.tau))
        }
        Piece::Hopping => spinful_quadratic(ns, &(lattice.adjacency() * -params.tau)),
        Piece::Section(cover, s) => {
            let r = cover
                .section_adjacencies(ns)
                .into_iter()
                .nth(s)
                .ok_or(Error::SectionCount { expected: s + 1, got: cover.n_sections() })?;
            spinful_quadratic(ns, &(r * -params.tau))
        }
        Piece::Tile(tile) => {
            let mut r = DMatrix::zeros(ns, ns);
            for (i, j) in tile.edges() {
                if i >= ns || j >= ns {
                    return Err(Error::InvalidCover(format!("tile site out of range: ({i},{j})")));
                }
                r[(i, j)] = 1.0;
                r[(j, i)] = 1.0;
            }
            spinful_quadratic(ns, &(r * -params.tau))
        }
        Piece::OnSite => {
            check_modes(nm)?;
            let u = params.u;
            QubitOperator::diagonal(nm, |s| 0.25 * u * (0..ns).map(|i| z(s, up(i)) * z(s, down(i))).sum::<f64>())
        }
        Piece::NearestNeighbour => {
            check_modes(nm)?;
            let v = params.v;
            QubitOperator::diagonal(nm, |s| {
                let mut acc = 0.0;
                for &[i, j] in &edges {
                    for p in [up(i), down(i)] {
                        for q in [up(j), down(j)] {
                            acc += z(s, p) * z(s, q);
                        }
                    }
                }
                0.25 * v * acc
            })
        }
        Piece::Coulomb => jw_hamiltonian(lattice, params, Piece::OnSite)?
            .add(&jw_hamiltonian(lattice, params, Piece::NearestNeighbour)?),
        Piece::OnSiteUnshifted => {
            check_modes(nm)?;
            let u = params.u;
            QubitOperator::diagonal(nm, |s| u * (0..ns).map(|i| n(s, up(i)) * n(s, down(i))).sum::<f64>())
        }
        Piece::NearestNeighbourUnshifted => {
            check_modes(nm)?;
            let v = params.v;
            QubitOperator::diagonal(nm, |s| {
                let mut acc = 0.0;
                for &[i, j] in &edges {
                    for p in [up(i), down(i)] {
                        for q in [up(j), down(j)] {
                            acc += n(s, p) * n(s, q);
                        }
                    }
                }
                v * acc
            })
        }
    }
}
