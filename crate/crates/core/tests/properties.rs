use nalgebra::DMatrix;
use proptest::prelude::*;

use hubbard_tiles::exec::Execution;
use hubbard_tiles::freefermion::{commutator, ff_norm, schatten1, schatten1_general};
use hubbard_tiles::gatecount::{hwp_rotations, step_cost_periodic_extended, step_cost_periodic_hubbard};
use hubbard_tiles::lattice::LatticeGraph;
use hubbard_tiles::oracle::fermion::{jw_hamiltonian, spinful_quadratic, Piece};
use hubbard_tiles::oracle::norm::{dense_norm, exact_spectral_norm, sector_spectral_norm};
use hubbard_tiles::oracle::operator::{particle_number_key, spin_sector_key, QubitOperator, C64};
use hubbard_tiles::qpe::{n_walk, periodic_step_cost, trotter_qpe};
use hubbard_tiles::qubitization::{element_ledger, ledger_t, walk_costs, Block};
use hubbard_tiles::reference::AlphaRule;
use hubbard_tiles::tiling::{cover_periodic_hex, cover_tile_census, tile_catalog, validate_cover, SectionCover, TileKind};
use hubbard_tiles::trotterbounds::{periodic_sweep, ModelParams};

fn symmetric(n: usize, vals: &[f64], zero_diagonal: bool) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            let v = if i == j && zero_diagonal { 0.0 } else { vals[k % vals.len()] };
            k += 1;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

fn sym_matrix(max: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (1..=max, prop::collection::vec(-2.0f64..2.0, 1..40)).prop_map(|(n, v)| symmetric(n, &v, false))
}

fn even_l() -> impl Strategy<Value = usize> {
    (2usize..=6).prop_map(|h| 2 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schatten1_is_a_norm(a in sym_matrix(6), c in -3.0f64..3.0, v in prop::collection::vec(-2.0f64..2.0, 1..40)) {
        let b = symmetric(a.nrows(), &v, false);
        let na = schatten1(&a).unwrap();
        let nb = schatten1(&b).unwrap();
        prop_assert!(na >= 0.0);
        prop_assert!(schatten1(&(&a + &b)).unwrap() <= na + nb + 1e-9);
        prop_assert!((schatten1(&(&a * c)).unwrap() - c.abs() * na).abs() <= 1e-9 * (1.0 + na));
        // the one-norm dominates the operator norm and matches the SVD route
        let op = a.singular_values().max();
        prop_assert!(na + 1e-12 >= op);
        prop_assert!((schatten1_general(&a).unwrap() - na).abs() <= 1e-9 * (1.0 + na));
    }

    #[test]
    fn commutator_of_symmetric_is_antisymmetric(a in sym_matrix(5), v in prop::collection::vec(-2.0f64..2.0, 1..40)) {
        let b = symmetric(a.nrows(), &v, false);
        let c = commutator(&a, &b).unwrap();
        prop_assert!((&c + c.transpose()).amax() <= 1e-12);
        prop_assert!(schatten1(&c).is_err() || c.amax() <= 1e-12);
    }

    #[test]
    fn hopping_norm_matches_exact_diagonalisation(
        n in 2usize..=4,
        v in prop::collection::vec(-1.0f64..1.0, 1..12),
        tau in 0.1f64..2.0,
    ) {
        let r = symmetric(n, &v, true);
        let exact = sector_spectral_norm(&spinful_quadratic(n, &(&r * -tau)).unwrap(), particle_number_key).unwrap();
        let formula = ff_norm(&r, tau).unwrap();
        prop_assert!((exact - formula).abs() <= 1e-8 * (1.0 + formula), "exact {exact} formula {formula}");
    }

    #[test]
    fn hopping_norm_with_on_site_terms(
        n in 2usize..=4,
        v in prop::collection::vec(-1.0f64..1.0, 1..12),
    ) {
        // with a trace the two halves of the spectrum no longer balance:
        // each spin fills whichever side is larger
        let r = symmetric(n, &v, false);
        let exact = sector_spectral_norm(&spinful_quadratic(n, &(-&r)).unwrap(), particle_number_key).unwrap();
        let eig = r.symmetric_eigenvalues();
        let pos: f64 = eig.iter().filter(|&&x| x > 0.0).sum();
        let neg: f64 = -eig.iter().filter(|&&x| x < 0.0).sum::<f64>();
        prop_assert!((exact - 2.0 * pos.max(neg)).abs() <= 1e-8 * (1.0 + exact));
        prop_assert!(exact + 1e-9 >= ff_norm(&r, 1.0).unwrap());
    }

    #[test]
    fn power_iteration_matches_dense(entries in prop::collection::vec((0usize..16, 0usize..16, -1.0f64..1.0, -1.0f64..1.0), 1..40)) {
        let t: Vec<(usize, usize, C64)> = entries.iter().map(|&(r, c, re, im)| (r, c, C64::new(re, im))).collect();
        let op = QubitOperator::from_triplets(4, t).unwrap();
        let dense = dense_norm(&op.to_dense().unwrap());
        let power = exact_spectral_norm(&op, 1e-12).unwrap();
        prop_assert!((dense - power).abs() <= 1e-6 * (1.0 + dense), "dense {dense} power {power}");
    }

    #[test]
    fn jw_hamiltonian_is_hermitian_and_conserving(ring in 3usize..=5, u in 0.0f64..4.0, v in 0.0f64..4.0, tau in 0.1f64..2.0) {
        let lattice = LatticeGraph::ring(ring).unwrap();
        let params = ModelParams::extended(tau, u, v);
        for piece in [Piece::Hopping, Piece::OnSite, Piece::NearestNeighbour, Piece::Coulomb] {
            let h = jw_hamiltonian(&lattice, &params, piece).unwrap();
            prop_assert!(h.is_hermitian(1e-12));
            prop_assert!(h.preserves(particle_number_key));
            prop_assert!(h.preserves(spin_sector_key));
        }
    }

    #[test]
    fn phasing_with_one_rotation_is_plain(l in even_l()) {
        let n = 2 * (l * l) as u64;
        let h = step_cost_periodic_hubbard(n, 1).unwrap();
        prop_assert_eq!((h.n_rot, h.n_t, h.n_qubits, h.n_tof, h.alpha), (6 * n, 10 * n, 2 * n, 0, 0));
        let e = step_cost_periodic_extended(n, 1).unwrap();
        prop_assert_eq!((e.n_rot, e.n_t, e.n_qubits), (12 * n, 10 * n, 2 * n));
    }

    #[test]
    fn larger_phasing_groups_trade_rotations_for_toffolis(l in even_l(), k in 0u32..5) {
        let n = 2 * (l * l) as u64;
        let m = 1u64 << k;
        prop_assume!(n % (2 * m) == 0);
        let a = step_cost_periodic_hubbard(n, m).unwrap();
        let b = step_cost_periodic_hubbard(n, 2 * m).unwrap();
        prop_assert!(b.n_rot <= a.n_rot);
        prop_assert!(b.n_tof > a.n_tof);
        prop_assert_eq!(b.n_qubits, a.n_qubits + m);
    }

    #[test]
    fn hwp_rotation_count_is_bit_length(m in 1u64..100_000) {
        prop_assert_eq!(hwp_rotations(m), format!("{m:b}").len() as u64);
    }

    #[test]
    fn trotter_qpe_cost_falls_with_looser_accuracy(eps in 0.01f64..1.0, factor in 1.01f64..4.0, w in 50.0f64..5000.0) {
        let step = periodic_step_cost(hubbard_tiles::trotterbounds::Model::Hubbard, 128, AlphaRule::Half).unwrap();
        let tight = trotter_qpe(&step, w, eps, None).unwrap();
        let loose = trotter_qpe(&step, w, eps * factor, None).unwrap();
        prop_assert!(loose.total_t <= tight.total_t);
    }

    #[test]
    fn walk_count_falls_with_looser_accuracy(lambda in 1.0f64..1e4, eps in 0.001f64..1.0, factor in 1.0f64..4.0) {
        prop_assert!(n_walk(lambda, eps * factor) <= n_walk(lambda, eps));
    }

    #[test]
    fn ledger_blocks_are_positive(l in 2u64..=40, theta in 4u64..=16, gamma in 8u64..=48) {
        let ledger = element_ledger(l, l, theta, gamma).unwrap();
        prop_assert!(ledger_t(&ledger, Block::Select) > 0);
        prop_assert!(ledger_t(&ledger, Block::Prepare) > 0);
        let w = walk_costs(l, 1.0, 4.0, theta, gamma).unwrap();
        prop_assert!(w.per_walk_t() > 0);
    }
}

#[test]
fn periodic_covers_are_valid() {
    for l in [2usize, 4, 6, 8, 10, 12] {
        let lattice = LatticeGraph::periodic_hex(l, l).unwrap();
        let cover = cover_periodic_hex(&lattice).unwrap();
        let report = validate_cover(&lattice, &cover);
        assert!(report.valid, "L={l}: {:?}", report.violations);
        let n = lattice.n_sites();
        for census in cover_tile_census(&cover) {
            assert_eq!(census.get(&TileKind::S2).copied(), Some(n / 4), "L={l}");
        }
        let back = SectionCover::from_json(&cover.to_json().unwrap()).unwrap();
        assert!(validate_cover(&lattice, &back).valid);
    }
}

#[test]
fn tile_templates_reconstruct_adjacency() {
    for kind in TileKind::ALL {
        let t = tile_catalog(kind);
        assert!((t.reconstruct() - kind.local_adjacency()).amax() < 1e-12, "{kind}");
    }
}

fn roundtrip(lattice: &LatticeGraph) {
    let json = lattice.to_json().unwrap();
    let back = LatticeGraph::from_json(&json).unwrap();
    assert_eq!(back.edges(), lattice.edges());
    assert_eq!(back.fingerprint(), lattice.fingerprint());
    assert_eq!(back.to_json().unwrap(), json);
    let edges = lattice.edges();
    assert!(edges.windows(2).all(|w| w[0] < w[1]));
    assert!(edges.iter().all(|[i, j]| i < j));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn periodic_lattice_json_roundtrip(lx in 2usize..=8, ly in 2usize..=8) {
        roundtrip(&LatticeGraph::periodic_hex(lx, ly).unwrap());
    }

    #[test]
    fn custom_lattice_json_roundtrip(n in 2usize..=12, pairs in prop::collection::btree_set((0usize..12, 0usize..12), 0..30)) {
        let edges: Vec<(usize, usize)> =
            pairs.into_iter().filter(|&(a, b)| a < n && b < n && a != b).map(|(a, b)| (a.min(b), a.max(b))).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        if let Ok(lattice) = LatticeGraph::custom(n, &edges) {
            roundtrip(&lattice);
        }
    }

    #[test]
    fn periodic_lattice_is_three_regular(l in 2usize..=8) {
        let lattice = LatticeGraph::periodic_hex(l, l).unwrap();
        prop_assert_eq!(lattice.regular_degree(), Some(3));
        prop_assert_eq!(lattice.n_edges(), 3 * l * l);
    }
}

#[test]
fn parallel_and_sequential_sweeps_agree() {
    let params = ModelParams::extended(1.0, 4.0, 2.0);
    let a = periodic_sweep(&[4, 6, 8], &params, Execution::Sequential).unwrap();
    let b = periodic_sweep(&[4, 6, 8], &params, Execution::Parallel).unwrap();
    for ((_, x), (_, y)) in a.iter().zip(&b) {
        assert_eq!(x.w_tile.to_bits(), y.w_tile.to_bits());
    }
}
