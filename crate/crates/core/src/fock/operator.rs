//! Real sparse operators in compressed-row form and the rotated-frame Hamiltonians.

use std::collections::BTreeMap;

use super::basis::FockBasis;
use crate::params::SystemParams;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl SparseOperator {
    /// Assembles from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut entries: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (r, c, v) in triplets {
            *entries.entry((r, c)).or_insert(0.0) += v;
        }
        let mut row_start = vec![0; dim + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (&(r, c), &v) in &entries {
            if v != 0.0 {
                row_start[r + 1] += 1;
                cols.push(c);
                values.push(v);
            }
        }
        for r in 0..dim {
            row_start[r + 1] += row_start[r];
        }
        Self {
            dim,
            row_start,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(col, value)` pairs of row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_start[r]..self.row_start[r + 1];
        self.cols[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(col, _)| col == c).map_or(0.0, |(_, v)| v)
    }

    /// Largest `|H[r,c] − H[c,r]|`.
    pub fn asymmetry(&self) -> f64 {
        (0..self.dim)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .map(|(r, c, v)| (v - self.get(c, r)).abs())
            .fold(0.0, f64::max)
    }
}

/// `g(a†b + b†a) + Ω(a† + a)` or `J(a†bb + b†b†a) + Ω(a† + a)`, truncated to `basis`.
pub fn build_hamiltonian(params: &SystemParams, basis: &FockBasis) -> SparseOperator {
    // (coefficient, charger shift, battery shift)
    let terms: Vec<(f64, i32, i32)> = match params {
        SystemParams::Linear(p) => vec![(p.g, 1, -1), (p.g, -1, 1), (p.drive, 1, 0), (p.drive, -1, 0)],
        SystemParams::Nonlinear(p) => vec![(p.j, 1, -2), (p.j, -1, 2), (p.drive, 1, 0), (p.drive, -1, 0)],
    };
    let triplets = (0..basis.dim()).flat_map(|ket| {
        terms.iter().filter_map(move |&(coef, da, db)| {
            basis.shift(ket, da, db).map(|(bra, amp)| (bra, ket, coef * amp))
        })
    });
    SparseOperator::from_triplets(basis.dim(), triplets.collect::<Vec<_>>())
}
