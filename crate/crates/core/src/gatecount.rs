//! Gate counts for one Trotter step.
//!
//! Rotation and T counts follow the merged-boundary convention: the two
//! interaction half-steps of neighbouring Trotter steps fuse, so a step pays
//! for one interaction layer. The unmerged first/last half-step is reported
//! separately in [`StepCost::boundary_rot`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeGraph;
use crate::tiling::{cover_tile_census, SectionCover, TileKind};

/// Toffoli to T conversion factor.
pub const T_PER_TOFFOLI: u64 = 4;

/// Rotation layers per step on the periodic honeycomb: one interaction
/// layer plus five tile layers (blue and red twice, gold once).
pub const HUBBARD_LAYERS: u64 = 6;
/// Seven interaction layers (on-site plus the six nearest-neighbour spin
/// pairings) and the same five tile layers.
pub const EXTENDED_LAYERS: u64 = 12;

/// Section multiplicities in the symmetric step: outer sections are applied
/// twice, the middle one once.
pub const SECTION_MULTIPLICITY: [u64; 3] = [2, 2, 1];

/// Gates for one application of a tile evolution to one spin sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileGateCost {
    pub rot: u64,
    pub t: u64,
    pub cnot: u64,
    pub h: u64,
    pub s: u64,
    pub fswap: u64,
}

pub fn tile_gate_cost(kind: TileKind) -> TileGateCost {
    let (t, cnot, h, s, fswap) = match kind {
        TileKind::S1 => (0, 2, 8, 6, 0),
        TileKind::S2 => (4, 8, 20, 12, 0),
        TileKind::C4 => (8, 14, 32, 18, 0),
        TileKind::S4 => (12, 20, 44, 24, 2),
    };
    TileGateCost { rot: 2, t, cnot, h, s, fswap }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCost {
    pub n_rot: u64,
    /// T gates including the converted Toffolis, excluding rotation synthesis.
    pub n_t: u64,
    pub n_tof: u64,
    pub n_qubits: u64,
    pub n_cnot: u64,
    pub n_h: u64,
    pub n_s: u64,
    pub n_fswap: u64,
    /// Rotations merged per phasing group; 1 means no Hamming-weight phasing.
    pub hwp_m: u64,
    /// Phasing ancillas, `hwp_m − 1`.
    pub alpha: u64,
    /// Extra rotations paid once per circuit for the unmerged interaction
    /// half-step at the ends.
    pub boundary_rot: u64,
}

impl StepCost {
    /// T gates before the Toffoli conversion.
    pub fn base_t(&self) -> u64 {
        self.n_t - T_PER_TOFFOLI * self.n_tof
    }
}

/// `⌊log₂ m⌋ + 1`, the number of distinct rotations after phasing `m`
/// equal-angle rotations.
pub fn hwp_rotations(m: u64) -> u64 {
    assert!(m > 0, "phasing group must be nonempty");
    u64::from(64 - m.leading_zeros())
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    rot: u64,
    t: u64,
    cnot: u64,
    h: u64,
    s: u64,
    fswap: u64,
}

impl Tally {
    fn add(&mut self, g: TileGateCost, times: u64) {
        self.rot += g.rot * times;
        self.t += g.t * times;
        self.cnot += g.cnot * times;
        self.h += g.h * times;
        self.s += g.s * times;
        self.fswap += g.fswap * times;
    }
}

fn tile_tally(cover: &SectionCover) -> Result<Tally> {
    if cover.n_sections() > 3 {
        return Err(Error::InvalidCover(format!(
            "step costing needs at most 3 sections, got {}",
            cover.n_sections()
        )));
    }
    let mut tally = Tally::default();
    for (census, mult) in cover_tile_census(cover).iter().zip(SECTION_MULTIPLICITY) {
        for (&kind, &count) in census {
            tally.add(tile_gate_cost(kind), 2 * mult * count as u64);
        }
    }
    Ok(tally)
}

/// Hubbard step on a lattice with a given cover of up to three sections
/// (blue, red, gold order). With `N_b`, `N_r`, `N_g` S2 tiles this gives
/// `N + 8N_b + 8N_r + 4N_g` rotations and `16N_b + 16N_r + 8N_g` T gates.
pub fn step_cost_fragment(lattice: &LatticeGraph, cover: &SectionCover) -> Result<StepCost> {
    let n = lattice.n_sites() as u64;
    let tally = tile_tally(cover)?;
    Ok(StepCost {
        n_rot: n + tally.rot,
        n_t: tally.t,
        n_tof: 0,
        n_qubits: 2 * n,
        n_cnot: tally.cnot,
        n_h: tally.h,
        n_s: tally.s,
        n_fswap: tally.fswap,
        hwp_m: 1,
        alpha: 0,
        boundary_rot: n,
    })
}

/// Cliffords of the built-in periodic cover: N/4 S2 tiles per section.
fn periodic_cliffords(n: u64) -> Tally {
    let mut tally = Tally::default();
    for mult in SECTION_MULTIPLICITY {
        tally.add(tile_gate_cost(TileKind::S2), 2 * mult * (n / 4));
    }
    tally
}

fn periodic_step(n: u64, m: u64, layers: u64, interaction_layers: u64) -> Result<StepCost> {
    if m == 0 || n % m != 0 {
        return Err(Error::Divisibility { n: n as usize, m: m as usize });
    }
    if n % 4 != 0 {
        return Err(Error::InvalidParameter(format!("periodic site count {n} is not a multiple of 4")));
    }
    let base_t = 10 * n;
    let groups = layers * n / m;
    let (n_rot, n_tof) = if m == 1 { (layers * n, 0) } else { (groups * hwp_rotations(m), groups * (m - 1)) };
    let c = periodic_cliffords(n);
    Ok(StepCost {
        n_rot,
        n_t: base_t + T_PER_TOFFOLI * n_tof,
        n_tof,
        n_qubits: 2 * n + (m - 1),
        n_cnot: c.cnot,
        n_h: c.h,
        n_s: c.s,
        n_fswap: c.fswap,
        hwp_m: m,
        alpha: m - 1,
        boundary_rot: interaction_layers * n,
    })
}

/// Hubbard step on the periodic honeycomb with `N` sites, phasing groups of
/// `m` rotations (`m = 1` disables phasing).
pub fn step_cost_periodic_hubbard(n: u64, m: u64) -> Result<StepCost> {
    periodic_step(n, m, HUBBARD_LAYERS, 1)
}

/// Extended Hubbard step on the periodic honeycomb.
pub fn step_cost_periodic_extended(n: u64, m: u64) -> Result<StepCost> {
    periodic_step(n, m, EXTENDED_LAYERS, 7)
}

/// PPP step on the periodic honeycomb, optionally with one phasing group of
/// `N` per distance class (`α = N − 1`).
pub fn step_cost_ppp(n: u64, hwp: bool) -> StepCost {
    let c = periodic_cliffords(n);
    let mut cost = StepCost {
        n_rot: 2 * n * n + 4 * n,
        n_t: 10 * n,
        n_tof: 0,
        n_qubits: 2 * n,
        n_cnot: c.cnot,
        n_h: c.h,
        n_s: c.s,
        n_fswap: c.fswap,
        hwp_m: 1,
        alpha: 0,
        boundary_rot: 2 * n * n - n,
    };
    if hwp && n > 1 {
        cost.n_rot = (2 * n + 4) * hwp_rotations(n);
        cost.n_tof = 2 * n * n + 2 * n - 4;
        cost.n_t = 10 * n + T_PER_TOFFOLI * cost.n_tof;
        cost.n_qubits = 3 * n - 1;
        cost.hwp_m = n;
        cost.alpha = n - 1;
    }
    cost
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::cover_periodic_hex;

    #[test]
    fn hwp_rotation_counts() {
        assert_eq!(hwp_rotations(1), 1);
        assert_eq!(hwp_rotations(8), 4);
        assert_eq!(hwp_rotations(31), 5);
        assert_eq!(hwp_rotations(32), 6);
    }

    #[test]
    fn hubbard_rows_at_32() {
        let c = step_cost_periodic_hubbard(32, 1).unwrap();
        assert_eq!((c.n_rot, c.n_t, c.n_qubits), (192, 320, 64));
        let c = step_cost_periodic_hubbard(32, 16).unwrap();
        assert_eq!((c.n_rot, c.n_t, c.n_qubits), (60, 1040, 79));
        let c = step_cost_periodic_hubbard(32, 32).unwrap();
        assert_eq!((c.n_rot, c.n_t, c.n_qubits), (36, 1064, 95));
    }

    #[test]
    fn extended_rows() {
        let c = step_cost_periodic_extended(32, 32).unwrap();
        assert_eq!((c.n_rot, c.n_t, c.n_qubits), (72, 1808, 95));
        let c = step_cost_periodic_extended(648, 324).unwrap();
        assert_eq!((c.n_rot, c.n_t), (216, 37488));
    }

    #[test]
    fn ppp_rows() {
        assert_eq!(step_cost_ppp(32, false).n_rot, 2176);
        let c = step_cost_ppp(32, true);
        assert_eq!((c.n_rot, c.n_t, c.n_qubits), (408, 8752, 95));
    }

    #[test]
    fn divisibility_checked() {
        assert!(matches!(step_cost_periodic_hubbard(32, 5), Err(Error::Divisibility { n: 32, m: 5 })));
    }

    #[test]
    fn periodic_cover_matches_closed_form() {
        let g = LatticeGraph::periodic_hex(4, 4).unwrap();
        let cover = cover_periodic_hex(&g).unwrap();
        let a = step_cost_fragment(&g, &cover).unwrap();
        let b = step_cost_periodic_hubbard(32, 1).unwrap();
        assert_eq!((a.n_rot, a.n_t, a.n_cnot, a.n_h, a.n_s), (b.n_rot, b.n_t, b.n_cnot, b.n_h, b.n_s));
    }

    #[test]
    fn empty_cover_costs_only_interaction() {
        let g = LatticeGraph::custom(5, &[]).unwrap();
        let c = step_cost_fragment(&g, &SectionCover { sections: vec![] }).unwrap();
        assert_eq!((c.n_rot, c.n_t), (5, 0));
    }
}
