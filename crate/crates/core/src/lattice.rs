//! Lattice graphs: periodic honeycomb, honeycomb fragments, open square
//! grids and arbitrary custom graphs.
//!
//! Honeycomb sites are addressed by a cell `(l_x, l_y)` and a sublattice
//! colour `c`. Site `(x, y, 0)` bonds to `(x, y, 1)`, `(x - 1, y, 1)` and
//! `(x, y - 1, 1)`. On the torus the flat index is
//! `i = 2 (l_x + l_y L_x) + c`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    PeriodicHex,
    HexFragment,
    SquareFragment,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiteRole {
    Center,
    Edge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SiteInfo {
    pub l_x: i64,
    pub l_y: i64,
    pub color: u8,
    pub role: SiteRole,
}

/// Undirected simple graph with per-site metadata. Immutable after build.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeGraph {
    kind: LatticeKind,
    dims: Option<(usize, usize)>,
    sites: Vec<SiteInfo>,
    neighbors: Vec<Vec<usize>>,
}

/// The three bonds leaving an `A` site, as offsets to `B` sites.
const HEX_BONDS: [(i64, i64); 3] = [(0, 0), (-1, 0), (0, -1)];

impl LatticeGraph {
    fn from_parts(
        kind: LatticeKind,
        dims: Option<(usize, usize)>,
        sites: Vec<SiteInfo>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let n = sites.len();
        let mut sets = vec![BTreeSet::new(); n];
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidLattice(format!("edge ({i},{j}) out of range")));
            }
            if i == j {
                return Err(Error::InvalidLattice(format!("self loop at {i}")));
            }
            if !sets[i].insert(j) {
                return Err(Error::InvalidLattice(format!("duplicate edge ({i},{j})")));
            }
            sets[j].insert(i);
        }
        let neighbors = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        Ok(Self { kind, dims, sites, neighbors })
    }

    /// Periodic honeycomb on an `l_x` by `l_y` torus of two-site cells.
    pub fn periodic_hex(l_x: usize, l_y: usize) -> Result<Self> {
        for d in [l_x, l_y] {
            if d < 2 {
                return Err(Error::DimensionTooSmall(d));
            }
        }
        let mut sites = Vec::with_capacity(2 * l_x * l_y);
        for y in 0..l_y {
            for x in 0..l_x {
                for c in 0..2u8 {
                    sites.push(SiteInfo {
                        l_x: x as i64,
                        l_y: y as i64,
                        color: c,
                        role: SiteRole::Center,
                    });
                }
            }
        }
        let idx = |x: i64, y: i64, c: usize| {
            let x = x.rem_euclid(l_x as i64) as usize;
            let y = y.rem_euclid(l_y as i64) as usize;
            2 * (x + y * l_x) + c
        };
        let mut edges = Vec::with_capacity(3 * l_x * l_y);
        for y in 0..l_y as i64 {
            for x in 0..l_x as i64 {
                for (dx, dy) in HEX_BONDS {
                    edges.push((idx(x, y, 0), idx(x + dx, y + dy, 1)));
                }
            }
        }
        Self::from_parts(LatticeKind::PeriodicHex, Some((l_x, l_y)), sites, edges)
    }

    /// Open honeycomb patch made of whole hexagons.
    ///
    /// Cell `(a, b)` is the hexagon through `A(a,b)`, `B(a,b)`, `A(a+1,b)`,
    /// `B(a+1,b-1)`, `A(a+1,b-1)`, `B(a,b-1)`. Only hexagon perimeter bonds
    /// are included, so every site lies on a complete hexagon. Sites are
    /// indexed in `(l_y, l_x, c)` order.
    pub fn hex_fragment(cells: &[(i64, i64)]) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidFragment("empty cell list".into()));
        }
        let cells: BTreeSet<(i64, i64)> = cells.iter().copied().collect();
        let mut bonds = BTreeSet::new();
        for &(a, b) in &cells {
            let ring = hexagon_ring(a, b);
            for k in 0..6 {
                let (p, q) = (ring[k], ring[(k + 1) % 6]);
                bonds.insert(if p < q { (p, q) } else { (q, p) });
            }
        }
        let coords: BTreeSet<(i64, i64, u8)> = bonds.iter().flat_map(|&(p, q)| [p, q]).collect();
        let mut ordered: Vec<(i64, i64, u8)> = coords.into_iter().collect();
        ordered.sort_by_key(|&(x, y, c)| (y, x, c));
        let index: BTreeMap<(i64, i64, u8), usize> =
            ordered.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let sites = ordered
            .iter()
            .map(|&(x, y, c)| SiteInfo { l_x: x, l_y: y, color: c, role: SiteRole::Center })
            .collect();
        let edges = bonds.iter().map(|(p, q)| (index[p], index[q]));
        let mut g = Self::from_parts(LatticeKind::HexFragment, None, sites, edges)?;
        if !g.is_connected() {
            return Err(Error::InvalidFragment("cells do not form a connected patch".into()));
        }
        g.assign_roles_by_degree(3);
        Ok(g)
    }

    /// Open `width` by `height` square grid. Interior sites are centers.
    pub fn square_fragment(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::DimensionTooSmall(width.min(height)));
        }
        let mut sites = Vec::with_capacity(width * height);
        let mut edges = Vec::new();
        for y in 0..height {
            for x in 0..width {
                let i = x + y * width;
                sites.push(SiteInfo {
                    l_x: x as i64,
                    l_y: y as i64,
                    color: 0,
                    role: SiteRole::Center,
                });
                if x + 1 < width {
                    edges.push((i, i + 1));
                }
                if y + 1 < height {
                    edges.push((i, i + width));
                }
            }
        }
        let mut g =
            Self::from_parts(LatticeKind::SquareFragment, Some((width, height)), sites, edges)?;
        g.assign_roles_by_degree(4);
        Ok(g)
    }

    /// Arbitrary simple graph. All sites are tagged as centers.
    pub fn custom(n_sites: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidLattice("no sites".into()));
        }
        let sites = (0..n_sites)
            .map(|i| SiteInfo { l_x: i as i64, l_y: 0, color: (i % 2) as u8, role: SiteRole::Center })
            .collect();
        Self::from_parts(LatticeKind::Custom, None, sites, edges.iter().copied())
    }

    /// Cycle graph on `n >= 3` sites.
    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::DimensionTooSmall(n));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::custom(n, &edges)
    }

    fn assign_roles_by_degree(&mut self, bulk: usize) {
        for (site, nb) in self.sites.iter_mut().zip(&self.neighbors) {
            site.role = if nb.len() >= bulk { SiteRole::Center } else { SiteRole::Edge };
        }
    }

    fn is_connected(&self) -> bool {
        let n = self.n_sites();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for &j in &self.neighbors[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn dims(&self) -> Option<(usize, usize)> {
        self.dims
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[SiteInfo] {
        &self.sites
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Edges as `[i, j]` with `i < j`, sorted lexicographically.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut out = Vec::new();
        for (i, nb) in self.neighbors.iter().enumerate() {
            out.extend(nb.iter().filter(|&&j| j > i).map(|&j| [i, j]));
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Dense adjacency matrix `R`.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let n = self.n_sites();
        let mut r = DMatrix::zeros(n, n);
        for (i, nb) in self.neighbors.iter().enumerate() {
            for &j in nb {
                r[(i, j)] = 1.0;
            }
        }
        r
    }

    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for nb in &self.neighbors {
            *h.entry(nb.len()).or_insert(0) += 1;
        }
        h
    }

    /// `Some(k)` when every site has exactly `k` neighbours.
    pub fn regular_degree(&self) -> Option<usize> {
        let h = self.degree_histogram();
        (h.len() == 1).then(|| *h.keys().next().unwrap())
    }

    /// `(N_c, N_ed)`: number of center and edge sites.
    pub fn role_counts(&self) -> (usize, usize) {
        let n_edge = self.sites.iter().filter(|s| s.role == SiteRole::Edge).count();
        (self.n_sites() - n_edge, n_edge)
    }

    /// Flat index of `(l_x, l_y, c)` on a periodic lattice, with wrap-around.
    pub fn periodic_index(&self, l_x: i64, l_y: i64, c: u8) -> Option<usize> {
        let (lx, ly) = self.dims.filter(|_| self.kind == LatticeKind::PeriodicHex)?;
        let x = l_x.rem_euclid(lx as i64) as usize;
        let y = l_y.rem_euclid(ly as i64) as usize;
        Some(2 * (x + y * lx) + c as usize)
    }

    /// FNV-1a hash of the sorted edge list, for golden-file comparisons.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |v: u64| {
            for b in v.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        eat(self.n_sites() as u64);
        for [i, j] in self.edges() {
            eat(i as u64);
            eat(j as u64);
        }
        h
    }

    /// Check the structural invariants for this lattice kind.
    pub fn validate(&self) -> Result<()> {
        for (i, nb) in self.neighbors.iter().enumerate() {
            for &j in nb {
                if j == i || !self.neighbors[j].contains(&i) {
                    return Err(Error::InvalidLattice(format!("asymmetric bond {i}-{j}")));
                }
            }
        }
        match self.kind {
            LatticeKind::PeriodicHex => {
                let (lx, ly) = self
                    .dims
                    .ok_or_else(|| Error::InvalidLattice("periodic lattice without dims".into()))?;
                if self.n_sites() != 2 * lx * ly {
                    return Err(Error::InvalidLattice("site count is not 2 L_x L_y".into()));
                }
                if self.regular_degree() != Some(3) {
                    return Err(Error::InvalidLattice("periodic honeycomb must be 3-regular".into()));
                }
            }
            LatticeKind::HexFragment => {
                for (i, nb) in self.neighbors.iter().enumerate() {
                    let d = nb.len();
                    if !(2..=3).contains(&d) {
                        return Err(Error::InvalidFragment(format!("site {i} has degree {d}")));
                    }
                    let expect = if d == 2 { SiteRole::Edge } else { SiteRole::Center };
                    if self.sites[i].role != expect {
                        return Err(Error::InvalidFragment(format!("site {i} has the wrong role")));
                    }
                }
                self.check_full_hexagons()?;
            }
            LatticeKind::SquareFragment | LatticeKind::Custom => {}
        }
        Ok(())
    }

    fn check_full_hexagons(&self) -> Result<()> {
        let index: BTreeMap<(i64, i64, u8), usize> = self
            .sites
            .iter()
            .enumerate()
            .map(|(i, s)| ((s.l_x, s.l_y, s.color), i))
            .collect();
        let mut covered = vec![false; self.n_sites()];
        for s in &self.sites {
            // the hexagons through any site are among these four cells
            for (a, b) in [(s.l_x, s.l_y), (s.l_x - 1, s.l_y), (s.l_x - 1, s.l_y + 1), (s.l_x, s.l_y + 1)] {
                let ring = hexagon_ring(a, b);
                let ids: Option<Vec<usize>> = ring.iter().map(|p| index.get(p).copied()).collect();
                let Some(ids) = ids else { continue };
                if (0..6).all(|k| self.is_adjacent(ids[k], ids[(k + 1) % 6])) {
                    for i in ids {
                        covered[i] = true;
                    }
                }
            }
        }
        match covered.iter().position(|c| !c) {
            Some(i) => Err(Error::InvalidFragment(format!("site {i} is on no complete hexagon"))),
            None => Ok(()),
        }
    }

    pub fn to_doc(&self) -> LatticeDoc {
        LatticeDoc {
            kind: self.kind,
            dims: self.dims.map(|(a, b)| [a, b]),
            sites: self
                .sites
                .iter()
                .enumerate()
                .map(|(i, s)| SiteDoc { i, l_x: s.l_x, l_y: s.l_y, c: s.color, role: s.role })
                .collect(),
            edges: self.edges(),
        }
    }

    pub fn from_doc(doc: &LatticeDoc) -> Result<Self> {
        for (k, s) in doc.sites.iter().enumerate() {
            if s.i != k {
                return Err(Error::InvalidLattice(format!("site {k} carries index {}", s.i)));
            }
        }
        let sites = doc
            .sites
            .iter()
            .map(|s| SiteInfo { l_x: s.l_x, l_y: s.l_y, color: s.c, role: s.role })
            .collect();
        let g = Self::from_parts(
            doc.kind,
            doc.dims.map(|[a, b]| (a, b)),
            sites,
            doc.edges.iter().map(|&[i, j]| (i, j)),
        )?;
        g.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_doc())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_doc(&serde_json::from_str(s)?)
    }
}

/// Perimeter of hexagon cell `(a, b)` in cyclic order.
fn hexagon_ring(a: i64, b: i64) -> [(i64, i64, u8); 6] {
    [(a, b, 0), (a, b, 1), (a + 1, b, 0), (a + 1, b - 1, 1), (a + 1, b - 1, 0), (a, b - 1, 1)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteDoc {
    pub i: usize,
    pub l_x: i64,
    pub l_y: i64,
    pub c: u8,
    pub role: SiteRole,
}

/// Serialized lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeDoc {
    pub kind: LatticeKind,
    pub dims: Option<[usize; 2]>,
    pub sites: Vec<SiteDoc>,
    pub edges: Vec<[usize; 2]>,
}

/// The 25-hexagon rhombic patch (`N_ed = 22`, `N_c = 48`).
pub fn rhombus_fragment_cells() -> Vec<(i64, i64)> {
    (0..5).flat_map(|a| (0..5).map(move |b| (a, b))).collect()
}

/// A 15-hexagon trapezoidal patch with rows of 4, 5 and 6 hexagons
/// (`N_ed = 20`, `N_c = 28`).
pub fn trapezoid_fragment_cells() -> Vec<(i64, i64)> {
    let mut cells = Vec::new();
    for (b, len) in [(0, 4), (1, 5), (2, 6)] {
        cells.extend((0..len).map(|a| (a, b)));
    }
    cells
}
