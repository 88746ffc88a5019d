//! Sparse design operator `B` with `B[i, (l,j)] = γ_{l,j}(t_i)`.
//!
//! For each data point and each level vector present in the grid, at most
//! one basis function of that level is non-zero, so rows are assembled by
//! direct index lookup instead of testing every key. `B` is stored in
//! compressed rows together with its transpose; both products run row by
//! row, so results do not depend on evaluation order.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;

use super::basis::{candidate_index, eval_1d, BasisKey};
use super::grid::AdaptiveGrid;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
struct Csr {
    ptr: Vec<usize>,
    idx: Vec<u32>,
    val: Vec<f64>,
}

impl Csr {
    fn mul(&self, v: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let (a, b) = (self.ptr[r], self.ptr[r + 1]);
            *o = self.idx[a..b].iter().zip(&self.val[a..b]).map(|(&c, &w)| w * v[c as usize]).sum();
        }
    }
}

/// Design operator of a grid on a dataset inside `[0, 1]^k`.
#[derive(Clone, Debug)]
pub struct DesignMatrix {
    rows: Csr,
    cols: Csr,
    n_rows: usize,
    n_cols: usize,
}

pub fn check_unit_cube(data: &Dataset) -> Result<()> {
    match data.raw_points().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        Some(&value) => Err(Error::OutsideUnitCube { value }),
        None => Ok(()),
    }
}

impl DesignMatrix {
    pub fn assemble(grid: &AdaptiveGrid, data: &Dataset) -> Result<Self> {
        if data.dim() != grid.dim() {
            return Err(Error::DimensionMismatch { expected: grid.dim(), got: data.dim() });
        }
        check_unit_cube(data)?;
        let dim = grid.dim();
        // level vector -> (index vector -> column)
        let mut groups: BTreeMap<&[u32], HashMap<&[u32], u32>> = BTreeMap::new();
        for (col, key) in grid.keys().enumerate() {
            groups.entry(key.levels()).or_default().insert(key.indices(), col as u32);
        }
        let groups: Vec<_> = groups.into_iter().collect();

        let n = data.len();
        let mut ptr = Vec::with_capacity(n + 1);
        let mut idx = Vec::new();
        let mut val = Vec::new();
        ptr.push(0);
        let mut cand = vec![0u32; dim];
        let mut row: Vec<(u32, f64)> = Vec::new();
        for t in data.points() {
            row.clear();
            for (levels, members) in &groups {
                let mut w = 1.0;
                for j in 0..dim {
                    cand[j] = candidate_index(levels[j], t[j]);
                    w *= eval_1d(levels[j], cand[j], t[j]);
                    if w == 0.0 {
                        break;
                    }
                }
                if w == 0.0 {
                    continue;
                }
                if let Some(&c) = members.get(cand.as_slice()) {
                    row.push((c, w));
                }
            }
            row.sort_unstable_by_key(|e| e.0);
            for &(c, w) in &row {
                idx.push(c);
                val.push(w);
            }
            ptr.push(idx.len());
        }
        let rows = Csr { ptr, idx, val };
        let cols = transpose(&rows, grid.len());
        Ok(Self { rows, cols, n_rows: n, n_cols: grid.len() })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.rows.val.len()
    }

    /// `Bv`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_rows];
        self.rows.mul(v, &mut out);
        out
    }

    /// `Bᵀr`.
    pub fn apply_transpose(&self, r: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols];
        self.cols.mul(r, &mut out);
        out
    }

    /// `(BᵀB + λI)v`, reusing `scratch` of length `n_rows`.
    pub fn normal_apply(&self, v: &[f64], lambda: f64, scratch: &mut Vec<f64>, out: &mut [f64]) {
        scratch.resize(self.n_rows, 0.0);
        self.rows.mul(v, scratch);
        self.cols.mul(scratch, out);
        if lambda != 0.0 {
            for (o, &x) in out.iter_mut().zip(v) {
                *o += lambda * x;
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_rows, self.n_cols);
        for r in 0..self.n_rows {
            for k in self.rows.ptr[r]..self.rows.ptr[r + 1] {
                m[(r, self.rows.idx[k] as usize)] = self.rows.val[k];
            }
        }
        m
    }
}

fn transpose(a: &Csr, n_cols: usize) -> Csr {
    let mut counts = vec![0usize; n_cols + 1];
    for &c in &a.idx {
        counts[c as usize + 1] += 1;
    }
    for i in 0..n_cols {
        counts[i + 1] += counts[i];
    }
    let mut fill = counts.clone();
    let mut idx = vec![0u32; a.idx.len()];
    let mut val = vec![0.0; a.val.len()];
    for r in 0..a.ptr.len() - 1 {
        for k in a.ptr[r]..a.ptr[r + 1] {
            let c = a.idx[k] as usize;
            idx[fill[c]] = r as u32;
            val[fill[c]] = a.val[k];
            fill[c] += 1;
        }
    }
    Csr { ptr: counts, idx, val }
}

/// Dense reference design matrix obtained by evaluating every key at every point.
pub fn dense_design(grid: &AdaptiveGrid, data: &Dataset) -> DMatrix<f64> {
    let keys: Vec<&BasisKey> = grid.keys().collect();
    DMatrix::from_fn(data.len(), keys.len(), |i, j| keys[j].eval(data.point(i)))
}
