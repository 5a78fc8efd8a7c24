//! Tile catalog and section covers.
//!
//! A tile is a small hopping graph whose adjacency matrix has exactly two
//! nonzero eigenvalues `±λ` and eigenvectors built from powers of `1/√2`.
//! A section is a set of site-disjoint tiles; a cover is a list of sections
//! whose tiles use every lattice bond exactly once.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeGraph, LatticeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TileKind {
    S1,
    S2,
    C4,
    S4,
}

impl TileKind {
    pub const ALL: [TileKind; 4] = [TileKind::S1, TileKind::S2, TileKind::C4, TileKind::S4];

    /// Number of sites the tile spans.
    pub fn size(self) -> usize {
        match self {
            TileKind::S1 => 2,
            TileKind::S2 => 3,
            TileKind::C4 => 4,
            TileKind::S4 => 5,
        }
    }

    /// Local bonds in tile-local labels.
    pub fn local_edges(self) -> &'static [(usize, usize)] {
        match self {
            TileKind::S1 => &[(0, 1)],
            TileKind::S2 => &[(0, 1), (0, 2)],
            TileKind::C4 => &[(0, 2), (0, 3), (1, 2), (1, 3)],
            TileKind::S4 => &[(0, 1), (0, 2), (0, 3), (0, 4)],
        }
    }

    pub fn local_adjacency(self) -> DMatrix<f64> {
        let q = self.size();
        let mut r = DMatrix::zeros(q, q);
        for &(a, b) in self.local_edges() {
            r[(a, b)] = 1.0;
            r[(b, a)] = 1.0;
        }
        r
    }

    pub fn name(self) -> &'static str {
        match self {
            TileKind::S1 => "S1",
            TileKind::S2 => "S2",
            TileKind::C4 => "C4",
            TileKind::S4 => "S4",
        }
    }
}

impl fmt::Display for TileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TileKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownTile(s.to_string()))
    }
}

/// Closed-form spectral data of a catalog tile.
#[derive(Clone, Debug)]
pub struct TileTemplate {
    pub kind: TileKind,
    pub adjacency: DMatrix<f64>,
    /// The positive nonzero eigenvalue; the other is `-lambda`.
    pub lambda: f64,
    /// All eigenvalues, matching the columns of `eigenvectors`.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns: `v+`, `v-`, then the zero modes.
    pub eigenvectors: DMatrix<f64>,
}

impl TileTemplate {
    pub fn v_plus(&self) -> DVector<f64> {
        self.eigenvectors.column(0).into_owned()
    }

    pub fn v_minus(&self) -> DVector<f64> {
        self.eigenvectors.column(1).into_owned()
    }

    /// `Σ λ_e v_e v_eᵀ`, which must give back the adjacency matrix.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        v * DMatrix::from_diagonal(&DVector::from_column_slice(&self.eigenvalues)) * v.transpose()
    }
}

pub fn tile_catalog(kind: TileKind) -> TileTemplate {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let q = 0.5 * h;
    let (lambda, cols): (f64, Vec<Vec<f64>>) = match kind {
        TileKind::S1 => (1.0, vec![vec![h, h], vec![h, -h]]),
        TileKind::S2 => (
            std::f64::consts::SQRT_2,
            vec![vec![h, 0.5, 0.5], vec![h, -0.5, -0.5], vec![0.0, h, -h]],
        ),
        TileKind::C4 => (
            2.0,
            vec![
                vec![0.5, 0.5, 0.5, 0.5],
                vec![0.5, 0.5, -0.5, -0.5],
                vec![h, -h, 0.0, 0.0],
                vec![0.0, 0.0, h, -h],
            ],
        ),
        TileKind::S4 => (
            2.0,
            vec![
                vec![h, q, q, q, q],
                vec![h, -q, -q, -q, -q],
                vec![0.0, h, -h, 0.0, 0.0],
                vec![0.0, 0.0, 0.0, h, -h],
                vec![0.0, 0.5, 0.5, -0.5, -0.5],
            ],
        ),
    };
    let n = kind.size();
    let mut eigenvalues = vec![0.0; n];
    eigenvalues[0] = lambda;
    eigenvalues[1] = -lambda;
    let flat: Vec<f64> = cols.into_iter().flatten().collect();
    TileTemplate {
        kind,
        adjacency: kind.local_adjacency(),
        lambda,
        eigenvalues,
        eigenvectors: DMatrix::from_column_slice(n, n, &flat),
    }
}

/// A catalog tile placed on lattice sites; `sites[k]` carries local label `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tile {
    pub kind: TileKind,
    pub sites: Vec<usize>,
}

impl Tile {
    pub fn new(kind: TileKind, sites: Vec<usize>) -> Self {
        Self { kind, sites }
    }

    /// Lattice bonds used by the tile, each as `(min, max)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.kind
            .local_edges()
            .iter()
            .filter_map(|&(a, b)| {
                let (i, j) = (*self.sites.get(a)?, *self.sites.get(b)?);
                Some((i.min(j), i.max(j)))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub color: String,
    pub tiles: Vec<Tile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionCover {
    pub sections: Vec<Section>,
}

pub const SECTION_COLORS: [&str; 4] = ["blue", "red", "gold", "green"];

impl SectionCover {
    pub fn n_sections(&self) -> usize {
        self.sections.len()
    }

    /// Coupling matrix of each section: the sum of its placed tile adjacencies.
    pub fn section_adjacencies(&self, n_sites: usize) -> Vec<DMatrix<f64>> {
        self.sections
            .iter()
            .map(|s| {
                let mut r = DMatrix::zeros(n_sites, n_sites);
                for t in &s.tiles {
                    for (i, j) in t.edges() {
                        r[(i, j)] += 1.0;
                        r[(j, i)] += 1.0;
                    }
                }
                r
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    /// Wrong site count, repeated site or out-of-range index.
    MalformedTile { section: usize, tile: usize, reason: String },
    /// A tile bond that is not a lattice bond.
    NotALatticeEdge { section: usize, tile: usize, edge: (usize, usize) },
    /// Two tiles of one section touch the same site.
    SectionOverlap { section: usize, site: usize },
    DuplicateEdge { edge: (usize, usize) },
    MissingEdge { edge: (usize, usize) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MalformedTile { section, tile, reason } => {
                write!(f, "malformed tile {tile} in section {section}: {reason}")
            }
            Violation::NotALatticeEdge { section, tile, edge } => {
                write!(f, "tile {tile} in section {section} uses non-edge {edge:?}")
            }
            Violation::SectionOverlap { section, site } => {
                write!(f, "section overlap: section {section} touches site {site} twice")
            }
            Violation::DuplicateEdge { edge } => write!(f, "duplicate edge {edge:?}"),
            Violation::MissingEdge { edge } => write!(f, "missing edge {edge:?}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

/// Check site-disjointness within sections, exact once-coverage of the
/// lattice bonds and catalog conformance of every tile.
pub fn validate_cover(lattice: &LatticeGraph, cover: &SectionCover) -> CoverReport {
    let n = lattice.n_sites();
    let mut violations = Vec::new();
    let mut uses: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (si, section) in cover.sections.iter().enumerate() {
        let mut touched = BTreeSet::new();
        for (ti, tile) in section.tiles.iter().enumerate() {
            let distinct: BTreeSet<_> = tile.sites.iter().collect();
            let reason = if tile.sites.len() != tile.kind.size() {
                Some(format!("{} needs {} sites, got {}", tile.kind, tile.kind.size(), tile.sites.len()))
            } else if distinct.len() != tile.sites.len() {
                Some("repeated site".to_string())
            } else if let Some(&&bad) = distinct.iter().find(|&&&s| s >= n) {
                Some(format!("site {bad} out of range"))
            } else {
                None
            };
            if let Some(reason) = reason {
                violations.push(Violation::MalformedTile { section: si, tile: ti, reason });
                continue;
            }
            for &s in &tile.sites {
                if !touched.insert(s) {
                    violations.push(Violation::SectionOverlap { section: si, site: s });
                }
            }
            for e in tile.edges() {
                if lattice.is_adjacent(e.0, e.1) {
                    *uses.entry(e).or_insert(0) += 1;
                } else {
                    violations.push(Violation::NotALatticeEdge { section: si, tile: ti, edge: e });
                }
            }
        }
    }
    for [i, j] in lattice.edges() {
        match uses.get(&(i, j)).copied().unwrap_or(0) {
            0 => violations.push(Violation::MissingEdge { edge: (i, j) }),
            1 => {}
            _ => violations.push(Violation::DuplicateEdge { edge: (i, j) }),
        }
    }
    CoverReport { valid: violations.is_empty(), violations }
}

/// Per-section tile counts.
pub fn cover_tile_census(cover: &SectionCover) -> Vec<BTreeMap<TileKind, usize>> {
    cover
        .sections
        .iter()
        .map(|s| {
            let mut m = BTreeMap::new();
            for t in &s.tiles {
                *m.entry(t.kind).or_insert(0) += 1;
            }
            m
        })
        .collect()
}

/// Bond classes of the three-colour pattern on a 2×2 block of cells.
/// An entry `(x, y, d)` names the bond from `A(x, y)` to `B(x, y)` (d = 0),
/// `B(x - 1, y)` (d = 1) or `B(x, y - 1)` (d = 2).
const HEX_PATTERN: [[(i64, i64, usize); 4]; 3] = [
    [(0, 0, 0), (0, 0, 1), (1, 0, 2), (1, 1, 0)],
    [(0, 1, 1), (0, 1, 2), (1, 1, 1), (1, 1, 2)],
    [(0, 0, 2), (0, 1, 0), (1, 0, 0), (1, 0, 1)],
];

/// Three sections (blue, red, gold) of `N/4` S2 tiles each.
pub fn cover_periodic_hex(lattice: &LatticeGraph) -> Result<SectionCover> {
    let (lx, ly) = match (lattice.kind(), lattice.dims()) {
        (LatticeKind::PeriodicHex, Some(d)) => d,
        _ => return Err(Error::NoCover("not a periodic honeycomb".into())),
    };
    if lx % 2 != 0 || ly % 2 != 0 {
        return Err(Error::NoCover(format!("{lx}x{ly} torus has an odd side")));
    }
    let idx = |x: i64, y: i64, c: u8| lattice.periodic_index(x, y, c).expect("periodic lattice");
    let mut sections = Vec::with_capacity(3);
    for (color, class) in SECTION_COLORS.iter().zip(HEX_PATTERN) {
        let mut edges = Vec::new();
        for by in (0..ly as i64).step_by(2) {
            for bx in (0..lx as i64).step_by(2) {
                for (x, y, d) in class {
                    let (x, y) = (bx + x, by + y);
                    let (dx, dy) = [(0, 0), (-1, 0), (0, -1)][d];
                    edges.push((idx(x, y, 0), idx(x + dx, y + dy, 1)));
                }
            }
        }
        let tiles = star_tiles(&edges)
            .ok_or_else(|| Error::NoCover(format!("{lx}x{ly} torus is too small for the pattern")))?;
        sections.push(Section { color: color.to_string(), tiles });
    }
    Ok(SectionCover { sections })
}

/// Split a bond set whose connected components are two-bond paths into S2
/// tiles, center first. `None` if any component has another shape.
fn star_tiles(edges: &[(usize, usize)]) -> Option<Vec<Tile>> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(i, j) in edges {
        adj.entry(i).or_default().push(j);
        adj.entry(j).or_default().push(i);
    }
    let mut tiles = Vec::new();
    for (&c, nb) in &adj {
        match nb.len() {
            1 => {}
            2 => {
                let (a, b) = (nb[0].min(nb[1]), nb[0].max(nb[1]));
                if a == b || adj[&a].len() != 1 || adj[&b].len() != 1 {
                    return None;
                }
                tiles.push(Tile::new(TileKind::S2, vec![c, a, b]));
            }
            _ => return None,
        }
    }
    (tiles.len() * 2 == edges.len()).then_some(tiles)
}

/// Greedy cover for honeycomb fragments.
///
/// Sites are visited in index order, degree-3 sites first and then the
/// rest; each visited site takes its two lowest uncovered bonds as an S2
/// tile. Leftover bonds become S1 tiles. Tiles are then coloured first-fit
/// into three sections, and a fourth is opened only if first-fit fails.
pub fn cover_hex_fragment(lattice: &LatticeGraph) -> Result<SectionCover> {
    if lattice.kind() != LatticeKind::HexFragment {
        return Err(Error::NoCover("not a honeycomb fragment".into()));
    }
    let n = lattice.n_sites();
    let mut used = BTreeSet::new();
    let mut tiles = Vec::new();
    for pass_degree in [3, 2] {
        for c in (0..n).filter(|&i| lattice.degree(i) == pass_degree) {
            let free: Vec<usize> = lattice
                .neighbors(c)
                .iter()
                .copied()
                .filter(|&j| !used.contains(&(c.min(j), c.max(j))))
                .take(2)
                .collect();
            if let [a, b] = free[..] {
                used.insert((c.min(a), c.max(a)));
                used.insert((c.min(b), c.max(b)));
                tiles.push(Tile::new(TileKind::S2, vec![c, a, b]));
            }
        }
    }
    for [i, j] in lattice.edges() {
        if !used.contains(&(i, j)) {
            tiles.push(Tile::new(TileKind::S1, vec![i, j]));
        }
    }

    let mut sections: Vec<(Section, BTreeSet<usize>)> = Vec::new();
    for tile in tiles {
        let slot = sections.iter().position(|(_, occ)| tile.sites.iter().all(|s| !occ.contains(s)));
        let k = match slot {
            Some(k) => k,
            None if sections.len() < SECTION_COLORS.len() => {
                let color = SECTION_COLORS[sections.len()].to_string();
                sections.push((Section { color, tiles: Vec::new() }, BTreeSet::new()));
                sections.len() - 1
            }
            None => return Err(Error::NoCover("first-fit needs more than four sections".into())),
        };
        sections[k].1.extend(tile.sites.iter().copied());
        sections[k].0.tiles.push(tile);
    }
    // always report at least three sections so the three-section formulas apply
    while sections.len() < 3 {
        let color = SECTION_COLORS[sections.len()].to_string();
        sections.push((Section { color, tiles: Vec::new() }, BTreeSet::new()));
    }
    Ok(SectionCover { sections: sections.into_iter().map(|(s, _)| s).collect() })
}
