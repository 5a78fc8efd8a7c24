//! Exact checks of the tile identities, the commutator bounds, the Trotter
//! step error and the interaction energy shifts on desk-sized systems.

use nalgebra::DMatrix;

use super::fermion::{hop, jw_hamiltonian, quadratic, zz, Piece};
use super::norm::{dense_norm, hermitian_eigen, exact_spectral_norm, sector_spectral_norm, DEFAULT_TOL};
use super::operator::{particle_number_key, sectors, spin_sector_key, QubitOperator, C64};
use super::Report;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::freefermion::{ff_norm, ff_norm_sector, schatten1};
use crate::lattice::{LatticeGraph, LatticeKind};
use crate::tiling::{cover_hex_fragment, tile_catalog, SectionCover, TileKind};
use crate::trotterbounds::{
    bound_chc, bound_ihh_fragment, bound_ihh_sitewise, bound_vhh, w_tile, ModelParams,
};

/// Tolerance on the tile evolution comparison.
pub const TILE_TOL: f64 = 1e-10;
/// Tolerance on the energy shift comparison.
pub const SHIFT_TOL: f64 = 1e-10;
/// Tolerance on the free-fermion norm comparison.
pub const FF_TOL: f64 = 1e-8;
/// Largest register for which the Trotter step is checked with dense blocks.
pub const TROTTER_MAX_QUBITS: usize = 14;

const I: C64 = C64::new(0.0, 1.0);

/// Slack for comparing a bound with an exact value that may tie it.
fn dominates(bound: f64, exact: f64) -> bool {
    exact <= bound * (1.0 + 1e-9) + 1e-9
}

// ---------------------------------------------------------------- tiles

/// Rotation angle of the two-mode core of a tile evolution, `τλt`.
pub fn tile_core_angle(kind: TileKind, tau: f64, t: f64) -> f64 {
    tau * tile_catalog(kind).lambda * t
}

/// Fock-space lift `Γ(A)_{T,S} = det A[T,S]` of a single-particle basis change.
fn fock_lift(a: &DMatrix<f64>) -> DMatrix<f64> {
    let q = a.nrows();
    let dim = 1usize << q;
    let bits = |s: usize| (0..q).filter(|&k| s & (1 << k) != 0).collect::<Vec<_>>();
    let mut g = DMatrix::zeros(dim, dim);
    for t in 0..dim {
        let rows = bits(t);
        for s in (0..dim).filter(|s| s.count_ones() == t.count_ones()) {
            let cols = bits(s);
            g[(t, s)] = if rows.is_empty() {
                1.0
            } else {
                DMatrix::from_fn(rows.len(), cols.len(), |r, c| a[(rows[r], cols[c])]).determinant()
            };
        }
    }
    g
}

/// Two-mode core `exp(iθ(c₁†c₂ + c₂†c₁))` acting on modes 0 and 1.
fn core_rotation(q: usize, theta: f64) -> DMatrix<C64> {
    let dim = 1usize << q;
    let mut k = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        if (s & 1) ^ ((s >> 1) & 1) == 1 {
            k[(s, s)] = C64::new(theta.cos(), 0.0);
            k[(s ^ 0b11, s)] = I * theta.sin();
        } else {
            k[(s, s)] = C64::new(1.0, 0.0);
        }
    }
    k
}

/// Tile evolution built from the catalog eigenbasis, one spin sector.
pub fn tile_evolution_eigen(kind: TileKind, tau: f64, t: f64) -> DMatrix<C64> {
    let cat = tile_catalog(kind);
    let q = kind.size();
    let (vp, vm) = (cat.v_plus(), cat.v_minus());
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut w = DMatrix::zeros(q, q);
    for j in 0..q {
        w[(0, j)] = r2 * (vp[j] + vm[j]);
        w[(1, j)] = r2 * (vp[j] - vm[j]);
        for z in 2..q {
            w[(z, j)] = cat.eigenvectors[(j, z)];
        }
    }
    let g = fock_lift(&w).map(|x| C64::new(x, 0.0));
    g.transpose() * core_rotation(q, tile_core_angle(kind, tau, t)) * g
}

/// Tile evolution by dense exponentiation of `−iHt`, one spin sector.
pub fn tile_evolution_dense(kind: TileKind, tau: f64, t: f64) -> Result<DMatrix<C64>> {
    let h = quadratic(kind.size(), &(kind.local_adjacency() * -tau))?.to_dense()?;
    Ok((h * (-I * t)).exp())
}

/// Max-norm difference between the eigen route and dense exponentiation.
pub fn verify_tile_evolution(kind: TileKind, tau: f64, t: f64) -> Result<Report> {
    let a = tile_evolution_eigen(kind, tau, t);
    let b = tile_evolution_dense(kind, tau, t)?;
    let dev = (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max);
    Ok(Report::new(
        "tile_evolution",
        format!("{kind} tau={tau} t={t} angle={:.12}", tile_core_angle(kind, tau, t)),
        dev,
        TILE_TOL,
        dev <= TILE_TOL,
    ))
}

// ---------------------------------------------------------------- bounds

/// Small instances for the bound checks: 4-ring, 6-ring, single hexagon.
pub fn bound_instances() -> Result<Vec<(String, LatticeGraph)>> {
    Ok(vec![
        ("ring4".into(), LatticeGraph::ring(4)?),
        ("ring6".into(), LatticeGraph::ring(6)?),
        ("hexagon".into(), LatticeGraph::hex_fragment(&[(0, 0)])?),
    ])
}

/// The `(U, V)` grid of the bound checks.
pub fn bound_grid() -> Vec<(f64, f64)> {
    let vals = [0.0, 2.0, 4.0];
    vals.iter().flat_map(|&u| vals.iter().map(move |&v| (u, v))).collect()
}

fn nested(a: &QubitOperator, b: &QubitOperator, c: &QubitOperator) -> Result<QubitOperator> {
    a.commutator(b)?.commutator(c)
}

/// Exact `‖[[H_C,H_h],H_C]‖`, `‖[[H_I,H_h],H_h]‖`, `‖[[H_V,H_h],H_h]‖` against
/// their closed-form bounds. `bound_scale` multiplies every bound and exists
/// for fault injection.
pub fn verify_commutator_bounds(
    name: &str,
    lattice: &LatticeGraph,
    params: &ModelParams,
    bound_scale: f64,
) -> Result<Vec<Report>> {
    let k = lattice
        .regular_degree()
        .ok_or_else(|| Error::NotRegular(format!("{:?}", lattice.degree_histogram())))?;
    let n = lattice.n_sites();
    let exec = Execution::Sequential;
    let hh = jw_hamiltonian(lattice, params, Piece::Hopping)?;
    let hi = jw_hamiltonian(lattice, params, Piece::OnSite)?;
    let hv = jw_hamiltonian(lattice, params, Piece::NearestNeighbour)?;
    let hc = hi.add(&hv)?;

    let r1 = schatten1(&lattice.adjacency())?;
    let ihh_bound = if lattice.kind() == LatticeKind::HexFragment {
        let (nc, ne) = lattice.role_counts();
        bound_ihh_fragment(nc, ne, params.tau, params.u)
    } else {
        bound_ihh_sitewise(lattice, params.tau, params.u, exec)?
    };
    let cases = [
        ("chc", nested(&hc, &hh, &hc)?, bound_chc(r1, n, k, params)),
        ("ihh", nested(&hi, &hh, &hh)?, ihh_bound),
        ("vhh", nested(&hv, &hh, &hh)?, bound_vhh(lattice, k, params.tau, params.v, exec)?),
    ];
    let instance = format!("{name} U={} V={} tau={}", params.u, params.v, params.tau);
    cases
        .into_iter()
        .map(|(check, op, bound)| {
            let exact = sector_spectral_norm(&op, spin_sector_key)?;
            let bound = bound * bound_scale;
            Ok(Report::new(&format!("bound_{check}"), instance.clone(), exact, bound, dominates(bound, exact)))
        })
        .collect()
}

/// All bound checks over the instances and the `(U, V)` grid at `τ = 1`.
pub fn verify_all_commutator_bounds(bound_scale: f64, exec: Execution) -> Result<Vec<Report>> {
    let mut jobs = Vec::new();
    for (name, lattice) in bound_instances()? {
        for (u, v) in bound_grid() {
            jobs.push((name.clone(), lattice.clone(), ModelParams::extended(1.0, u, v)));
        }
    }
    let out = exec.try_map(&jobs, |(name, lattice, p)| verify_commutator_bounds(name, lattice, p, bound_scale))?;
    Ok(out.into_iter().flatten().collect())
}

// ---------------------------------------------------------------- trotter

/// Eigen-decomposed Hermitian block, reused for several times.
struct Block {
    vecs: DMatrix<C64>,
    vals: Vec<f64>,
}

impl Block {
    fn new(m: DMatrix<C64>) -> Self {
        let (vals, vecs) = hermitian_eigen(&m);
        Self { vecs, vals }
    }

    /// `exp(−iHt)`
    fn evolve(&self, t: f64) -> DMatrix<C64> {
        let mut scaled = self.vecs.clone();
        for (j, &l) in self.vals.iter().enumerate() {
            let ph = (-I * l * t).exp();
            scaled.column_mut(j).iter_mut().for_each(|x| *x *= ph);
        }
        scaled * self.vecs.adjoint()
    }
}

/// Per-sector Trotter step errors for each `t`, taking the maximum over
/// sectors. `hc` must be diagonal.
fn trotter_errors(
    full: &QubitOperator,
    hc: &QubitOperator,
    sections: &[QubitOperator],
    ts: &[f64],
    exec: Execution,
) -> Vec<f64> {
    let blocks = sectors(full.n_qubits(), spin_sector_key);
    let per_sector = exec.map(&blocks, |(_, basis)| {
        let exact = Block::new(full.restrict(basis));
        let diag: Vec<f64> = basis.iter().map(|&b| hc.get(b, b).re).collect();
        let secs: Vec<Block> = sections.iter().map(|s| Block::new(s.restrict(basis))).collect();
        ts.iter()
            .map(|&t| {
                let (last, outer) = secs.split_last().expect("at least one section");
                let half: Vec<_> = outer.iter().map(|b| b.evolve(t / 2.0)).collect();
                let mut step = last.evolve(t);
                for e in half.iter().rev() {
                    step = e * step * e;
                }
                // e^{−iH_C t/2} on both sides
                let phase: Vec<C64> = diag.iter().map(|&d| (-I * d * t / 2.0).exp()).collect();
                for r in 0..step.nrows() {
                    for c in 0..step.ncols() {
                        step[(r, c)] *= phase[r] * phase[c];
                    }
                }
                dense_norm(&(exact.evolve(t) - step))
            })
            .collect::<Vec<f64>>()
    });
    let mut worst = vec![0.0f64; ts.len()];
    for errs in per_sector {
        for (w, e) in worst.iter_mut().zip(errs) {
            *w = w.max(e);
        }
    }
    worst
}

/// Exact single-step tile Trotter error against `W_tile·t³` for each `t`.
pub fn verify_trotter_step(
    name: &str,
    lattice: &LatticeGraph,
    cover: &SectionCover,
    params: &ModelParams,
    ts: &[f64],
    bound_scale: f64,
) -> Result<Vec<Report>> {
    if 2 * lattice.n_sites() > TROTTER_MAX_QUBITS {
        return Err(Error::SizeLimit(2 * lattice.n_sites()));
    }
    if cover.n_sections() != 3 {
        return Err(Error::SectionCount { expected: 3, got: cover.n_sections() });
    }
    let w = w_tile(lattice, cover, params, Execution::Sequential)?.w_tile * bound_scale;
    let hh = jw_hamiltonian(lattice, params, Piece::Hopping)?;
    let hc = jw_hamiltonian(lattice, params, Piece::Coulomb)?;
    let full = hh.add(&hc)?;
    let sections = (0..3)
        .map(|s| jw_hamiltonian(lattice, params, Piece::Section(cover, s)))
        .collect::<Result<Vec<_>>>()?;
    let errs = trotter_errors(&full, &hc, &sections, ts, Execution::default());
    Ok(ts
        .iter()
        .zip(errs)
        .map(|(&t, e)| {
            let bound = w * t.powi(3);
            Report::new(
                "trotter_step",
                format!("{name} {} U={} V={} t={t}", params.model, params.u, params.v),
                e,
                bound,
                dominates(bound, e),
            )
        })
        .collect())
}

/// Relative spread `(max − min)/max` of `error/t³` over a Trotter report set.
pub fn cubic_ratio_spread(reports: &[Report], ts: &[f64]) -> f64 {
    let ratios: Vec<f64> = reports.iter().zip(ts).map(|(r, &t)| r.exact / t.powi(3)).collect();
    let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
    let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
    if hi <= 0.0 {
        0.0
    } else {
        (hi - lo) / hi
    }
}

/// Hexagon Hubbard step check at `U = 4`, `τ = 1`, plus the cubic-order
/// check on the error ratios.
pub fn verify_hexagon_trotter(ts: &[f64], bound_scale: f64) -> Result<Vec<Report>> {
    let g = LatticeGraph::hex_fragment(&[(0, 0)])?;
    let cover = cover_hex_fragment(&g)?;
    let mut out = verify_trotter_step("hexagon", &g, &cover, &ModelParams::hubbard(1.0, 4.0), ts, bound_scale)?;
    let spread = cubic_ratio_spread(&out, ts);
    out.push(Report::new("trotter_cubic_order", "hexagon hubbard U=4 error/t^3 spread".into(), spread, 0.2, spread < 0.2));
    out.extend(verify_trotter_step("hexagon", &g, &cover, &ModelParams::extended(1.0, 4.0, 2.0), ts, bound_scale)?);
    Ok(out)
}

// ---------------------------------------------------------------- shifts

/// `ΔE_I = −(U/2)η + (U/4)N`
pub fn shift_onsite(u: f64, n_sites: usize, eta: usize) -> f64 {
    -0.5 * u * eta as f64 + 0.25 * u * n_sites as f64
}

/// `ΔE_V = (Vk/2)(N − 2η)` for a `k`-regular lattice.
pub fn shift_nearest_neighbour(v: f64, k: usize, n_sites: usize, eta: usize) -> f64 {
    0.5 * v * k as f64 * (n_sites as f64 - 2.0 * eta as f64)
}

/// The reference-table form `(Vk/4)(N − 4η)`. Its density term `−Vkη` is
/// right but the constant is half of `VkN/2`; kept so the mismatch can be
/// reported.
pub fn shift_nearest_neighbour_reference(v: f64, k: usize, n_sites: usize, eta: usize) -> f64 {
    0.25 * v * k as f64 * (n_sites as f64 - 4.0 * eta as f64)
}

/// Restricts `shifted − unshifted` to the `η`-electron sector and returns
/// `(mean diagonal, deviation from a multiple of the identity)`.
fn sector_shift(shifted: &QubitOperator, unshifted: &QubitOperator, eta: usize) -> Result<(f64, f64)> {
    let d = shifted.sub(unshifted)?;
    let basis: Vec<usize> = (0..d.dim()).filter(|&s| particle_number_key(s) == eta).collect();
    if basis.is_empty() {
        return Err(Error::InvalidParameter(format!("no states with {eta} electrons")));
    }
    let m = d.restrict(&basis);
    let mean = (0..basis.len()).map(|k| m[(k, k)].re).sum::<f64>() / basis.len() as f64;
    let mut dev = 0.0f64;
    for r in 0..basis.len() {
        for c in 0..basis.len() {
            let want = if r == c { mean } else { 0.0 };
            dev = dev.max((m[(r, c)] - C64::new(want, 0.0)).norm());
        }
    }
    Ok((mean, dev))
}

/// Measured shift between the `Z`-form and density-form interactions in the
/// `η`-electron sector, one report per term. The nearest-neighbour term is
/// only checked on regular lattices.
pub fn verify_chemical_shifts(
    name: &str,
    lattice: &LatticeGraph,
    params: &ModelParams,
    eta: usize,
) -> Result<Vec<Report>> {
    let n = lattice.n_sites();
    let instance = format!("{name} N={n} eta={eta} U={} V={}", params.u, params.v);
    let mut out = Vec::new();
    let (got, dev) = sector_shift(
        &jw_hamiltonian(lattice, params, Piece::OnSite)?,
        &jw_hamiltonian(lattice, params, Piece::OnSiteUnshifted)?,
        eta,
    )?;
    let want = shift_onsite(params.u, n, eta);
    out.push(Report::new(
        "shift_onsite",
        instance.clone(),
        got,
        want,
        dev <= SHIFT_TOL && (got - want).abs() <= SHIFT_TOL,
    ));
    if let Some(k) = lattice.regular_degree() {
        let (got, dev) = sector_shift(
            &jw_hamiltonian(lattice, params, Piece::NearestNeighbour)?,
            &jw_hamiltonian(lattice, params, Piece::NearestNeighbourUnshifted)?,
            eta,
        )?;
        let want = shift_nearest_neighbour(params.v, k, n, eta);
        out.push(Report::new(
            "shift_nearest_neighbour",
            instance,
            got,
            want,
            dev <= SHIFT_TOL && (got - want).abs() <= SHIFT_TOL,
        ));
    }
    Ok(out)
}

/// Shift instances: two-site chain, 4-ring and 6-ring over all fillings.
pub fn verify_all_chemical_shifts() -> Result<Vec<Report>> {
    let mut out = Vec::new();
    let chain = LatticeGraph::custom(2, &[(0, 1)])?;
    for eta in 0..=4 {
        out.extend(verify_chemical_shifts("chain2", &chain, &ModelParams::extended(1.0, 4.0, 2.0), eta)?);
    }
    for n in [4, 6] {
        let ring = LatticeGraph::ring(n)?;
        for eta in 0..=2 * n {
            out.extend(verify_chemical_shifts(&format!("ring{n}"), &ring, &ModelParams::extended(1.0, 4.0, 2.0), eta)?);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- rules

/// Number of orbitals in the commutator-rule toy system.
pub const RULE_MODES: usize = 5;

/// The four commutation rules between `Z Z` strings and hopping terms
/// `B_ij = −τ a†_i a_j`, checked as exact matrix identities over every
/// admissible index choice on a five-orbital register.
pub fn verify_commutator_rules(tau: f64) -> Result<Vec<Report>> {
    let m = RULE_MODES;
    let b = |i: usize, j: usize| hop(m, i, j).map(|h| h.scale_real(-tau));
    let mut worst = [0.0f64; 4];
    let mut count = [0usize; 4];
    for i in 0..m {
        for j in (0..m).filter(|&j| j != i) {
            let bij = b(i, j)?;
            let bji = b(j, i)?;
            worst[1] = worst[1].max(zz(m, i, j)?.commutator(&bij)?.max_abs());
            count[1] += 1;
            for l in (0..m).filter(|&l| l != i && l != j) {
                let z = zz(m, i, l)?;
                worst[2] = worst[2].max(z.anticommutator(&bij)?.max_abs());
                worst[3] = worst[3].max(z.anticommutator(&bji)?.max_abs());
                count[2] += 1;
                count[3] += 1;
                for p in (0..m).filter(|&p| p != i && p != j && p != l) {
                    worst[0] = worst[0].max(zz(m, l, p)?.commutator(&bij)?.max_abs());
                    count[0] += 1;
                }
            }
        }
    }
    let names = [
        "rule_disjoint_commute",
        "rule_shared_pair_commute",
        "rule_one_shared_anticommute",
        "rule_one_shared_reversed_anticommute",
    ];
    Ok(names
        .iter()
        .zip(worst)
        .zip(count)
        .map(|((name, w), c)| Report::new(name, format!("{m} orbitals, {c} index choices"), w, 0.0, w == 0.0))
        .collect())
}

// ---------------------------------------------------------------- free fermions

/// Lattices with at most six sites used for the free-fermion norm check.
pub fn small_lattices() -> Result<Vec<(String, LatticeGraph)>> {
    let mut out = Vec::new();
    for n in 2..=6 {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        out.push((format!("chain{n}"), LatticeGraph::custom(n, &edges)?));
    }
    for n in 3..=6 {
        out.push((format!("ring{n}"), LatticeGraph::ring(n)?));
    }
    out.push(("hexagon".into(), LatticeGraph::hex_fragment(&[(0, 0)])?));
    out.push(("square3x2".into(), LatticeGraph::square_fragment(3, 2)?));
    out.push(("star4".into(), LatticeGraph::custom(5, &[(0, 1), (0, 2), (0, 3), (0, 4)])?));
    Ok(out)
}

/// `‖H_h‖` by power iteration against `τ‖R‖₁` (both spins) and `τ‖R‖₁/2`
/// (one spin); the dense sector result is also required to agree.
pub fn verify_ff_norm(name: &str, lattice: &LatticeGraph, tau: f64) -> Result<Vec<Report>> {
    let p = ModelParams::hubbard(tau, 0.0);
    let adj = lattice.adjacency();
    let mut out = Vec::new();
    for (check, piece, formula) in [
        ("ff_norm_sector", Piece::HoppingSector, ff_norm_sector(&adj, tau)?),
        ("ff_norm", Piece::Hopping, ff_norm(&adj, tau)?),
    ] {
        let op = jw_hamiltonian(lattice, &p, piece)?;
        let power = exact_spectral_norm(&op, DEFAULT_TOL)?;
        let dense = sector_spectral_norm(&op, particle_number_key)?;
        let tol = FF_TOL * formula.max(1.0);
        out.push(Report::new(
            check,
            format!("{name} tau={tau}"),
            power,
            formula,
            (power - formula).abs() <= tol && (dense - formula).abs() <= tol,
        ));
    }
    Ok(out)
}

pub fn verify_all_ff_norms() -> Result<Vec<Report>> {
    let mut out = Vec::new();
    for (name, g) in small_lattices()? {
        out.extend(verify_ff_norm(&name, &g, 1.0)?);
    }
    Ok(out)
}

pub fn verify_all_tiles() -> Result<Vec<Report>> {
    let mut out = Vec::new();
    for kind in TileKind::ALL {
        for t in [0.0, 0.1, 0.5, 1.0] {
            out.push(verify_tile_evolution(kind, 1.0, t)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fock_lift_of_identity_is_identity() {
        let g = fock_lift(&DMatrix::identity(3, 3));
        assert_eq!(g, DMatrix::identity(8, 8));
    }

    #[test]
    fn s1_tile_one_sector_norm() {
        let h = quadratic(2, &(TileKind::S1.local_adjacency() * -1.5)).unwrap();
        assert!((dense_norm(&h.to_dense().unwrap()) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn tile_at_zero_time_is_identity() {
        for kind in TileKind::ALL {
            let u = tile_evolution_eigen(kind, 1.0, 0.0);
            let id = DMatrix::<C64>::identity(u.nrows(), u.ncols());
            assert!((u - id).iter().all(|x| x.norm() < 1e-12));
        }
    }

    #[test]
    fn core_angles() {
        assert!((tile_core_angle(TileKind::S2, 1.0, 0.3) - 2f64.sqrt() * 0.3).abs() < 1e-15);
        assert!((tile_core_angle(TileKind::C4, 1.0, 0.2) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_onsite(4.0, 2, 1), 0.0);
        assert_eq!(shift_nearest_neighbour(2.0, 2, 4, 2), 0.0);
        assert_eq!(shift_nearest_neighbour_reference(2.0, 2, 4, 2), -4.0);
    }

    #[test]
    fn zero_couplings_give_zero_commutators() {
        let g = LatticeGraph::ring(4).unwrap();
        let r = verify_commutator_bounds("ring4", &g, &ModelParams::extended(1.0, 0.0, 0.0), 1.0).unwrap();
        assert!(r.iter().all(|r| r.exact == 0.0 && r.bound == 0.0 && r.pass));
    }

    #[test]
    fn trotter_error_vanishes_at_zero_time() {
        let g = LatticeGraph::hex_fragment(&[(0, 0)]).unwrap();
        let cover = cover_hex_fragment(&g).unwrap();
        let r = verify_trotter_step("hexagon", &g, &cover, &ModelParams::hubbard(1.0, 4.0), &[0.0], 1.0).unwrap();
        assert!(r[0].exact < 1e-12);
    }
}
