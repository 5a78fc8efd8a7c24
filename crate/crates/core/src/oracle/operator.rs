//! Sparse complex operators on `n` qubits (compressed sparse rows).

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Largest register the oracle will build.
pub const MAX_QUBITS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct QubitOperator {
    n_qubits: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl QubitOperator {
    pub fn zeros(n_qubits: usize) -> Result<Self> {
        Self::from_triplets(n_qubits, Vec::new())
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        Self::from_triplets(n_qubits, (0..dim).map(|i| (i, i, C64::new(1.0, 0.0))).collect())
    }

    /// Diagonal operator with entries `f(basis index)`.
    pub fn diagonal(n_qubits: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        Self::from_triplets(n_qubits, (0..dim).map(|i| (i, i, C64::new(f(i), 0.0))).collect())
    }

    /// Builds from `(row, col, value)` entries; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(n_qubits: usize, mut entries: Vec<(usize, usize, C64)>) -> Result<Self> {
        check_size(n_qubits)?;
        let dim = 1usize << n_qubits;
        if let Some(&(r, c, _)) = entries.iter().find(|&&(r, c, _)| r >= dim || c >= dim) {
            return Err(Error::InvalidParameter(format!("entry ({r},{c}) outside dimension {dim}")));
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals: Vec<C64> = Vec::with_capacity(entries.len());
        let mut rows = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            if let (Some(&lr), Some(&lc)) = (rows.last(), cols.last()) {
                if lr == r && lc == c {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            cols.push(c);
            vals.push(v);
        }
        let mut out_cols = Vec::with_capacity(cols.len());
        let mut out_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != C64::new(0.0, 0.0) {
                row_ptr[r + 1] += 1;
                out_cols.push(c);
                out_vals.push(v);
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self { n_qubits, row_ptr, cols: out_cols, vals: out_vals })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Nonzeros of row `r` as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.row(r).find(|&(j, _)| j == c).map(|(_, v)| v).unwrap_or_default()
    }

    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        (0..self.dim()).flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v))).collect()
    }

    fn same_size(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(self.n_qubits, other.n_qubits));
        }
        Ok(())
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_size(other)?;
        let mut t = self.triplets();
        t.extend(other.triplets());
        Self::from_triplets(self.n_qubits, t)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale_real(-1.0))
    }

    pub fn adjoint(&self) -> Self {
        let t = self.triplets().into_iter().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.n_qubits, t).expect("adjoint keeps the size")
    }

    /// Sparse product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_size(other)?;
        let dim = self.dim();
        let mut acc = vec![C64::new(0.0, 0.0); dim];
        let mut mark = vec![usize::MAX; dim];
        let mut touched = Vec::new();
        let mut t = Vec::new();
        for r in 0..dim {
            touched.clear();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if mark[c] != r {
                        mark[c] = r;
                        acc[c] = C64::new(0.0, 0.0);
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            for &c in &touched {
                t.push((r, c, acc[c]));
            }
        }
        Self::from_triplets(self.n_qubits, t)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.dim()).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.sub(&self.adjoint()).map(|d| d.max_abs() <= tol).unwrap_or(false)
    }

    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        if self.n_qubits > 14 {
            return Err(Error::SizeLimit(self.n_qubits));
        }
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        Ok(m)
    }

    /// Dense restriction to the given basis states, in the given order.
    pub fn restrict(&self, basis: &[usize]) -> DMatrix<C64> {
        let mut pos = vec![usize::MAX; self.dim()];
        for (k, &b) in basis.iter().enumerate() {
            pos[b] = k;
        }
        let mut m = DMatrix::zeros(basis.len(), basis.len());
        for (k, &b) in basis.iter().enumerate() {
            for (c, v) in self.row(b) {
                if pos[c] != usize::MAX {
                    m[(k, pos[c])] = v;
                }
            }
        }
        m
    }

    /// Whether every nonzero connects two states with the same key.
    pub fn preserves(&self, key: impl Fn(usize) -> usize) -> bool {
        (0..self.dim()).all(|r| self.row(r).all(|(c, _)| key(r) == key(c)))
    }
}

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::SizeLimit(n_qubits));
    }
    Ok(())
}

/// Basis states grouped by a conserved key, keys in ascending order.
pub fn sectors(n_qubits: usize, key: impl Fn(usize) -> usize) -> Vec<(usize, Vec<usize>)> {
    let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for s in 0..1usize << n_qubits {
        map.entry(key(s)).or_default().push(s);
    }
    map.into_iter().collect()
}

/// Key for spin-resolved particle number with interleaved spin orbitals
/// (`i↑ = 2i`, `i↓ = 2i + 1`): `n↑ · 64 + n↓`.
pub fn spin_sector_key(s: usize) -> usize {
    const EVEN: usize = 0x5555_5555_5555_5555;
    let up = (s & EVEN).count_ones() as usize;
    let down = (s & !EVEN).count_ones() as usize;
    up * 64 + down
}

/// Key for total particle number.
pub fn particle_number_key(s: usize) -> usize {
    s.count_ones() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn duplicates_merge_and_cancel() {
        let op = QubitOperator::from_triplets(1, vec![(0, 1, c(1.0)), (0, 1, c(-1.0)), (1, 0, c(2.0))]).unwrap();
        assert_eq!(op.nnz(), 1);
        assert_eq!(op.get(1, 0), c(2.0));
    }

    #[test]
    fn product_against_dense() {
        let a = QubitOperator::from_triplets(2, vec![(0, 1, c(1.0)), (1, 2, C64::new(0.0, 2.0)), (3, 3, c(-1.0))])
            .unwrap();
        let b = a.adjoint();
        let sparse = a.mul(&b).unwrap().to_dense().unwrap();
        let dense = a.to_dense().unwrap() * b.to_dense().unwrap();
        assert!((sparse - dense).norm() < 1e-14);
    }

    #[test]
    fn size_limit() {
        assert!(matches!(QubitOperator::zeros(17), Err(Error::SizeLimit(17))));
    }

    #[test]
    fn spin_key_counts() {
        assert_eq!(spin_sector_key(0b0111), 2 * 64 + 1);
    }
}
