//! Modified linear hierarchical basis on `[0, 1]`.
//!
//! Level 1 holds the constant function. From level 2 on, interior odd
//! indices are ordinary hats of width `2^{1-l}`, while the outermost
//! functions extrapolate linearly towards the boundary, reaching 2 there.

use std::fmt;

use crate::error::{Error, Result};

/// Hierarchical basis function identifier: level vector `l` and odd
/// position vector `i`, with `1 ≤ i_j ≤ 2^{l_j} − 1`.
///
/// Ordered lexicographically by `(levels, indices)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisKey {
    levels: Vec<u32>,
    indices: Vec<u32>,
}

pub(crate) fn valid_1d(level: u32, index: u32) -> bool {
    (1..31).contains(&level) && index % 2 == 1 && index < (1u32 << level)
}

impl BasisKey {
    pub fn new(levels: Vec<u32>, indices: Vec<u32>) -> Result<Self> {
        if levels.len() != indices.len() {
            return Err(Error::DimensionMismatch { expected: levels.len(), got: indices.len() });
        }
        if let Some((&l, &i)) = levels.iter().zip(&indices).find(|(&l, &i)| !valid_1d(l, i)) {
            return Err(Error::InvalidBasisKey { level: l, index: i });
        }
        Ok(Self { levels, indices })
    }

    pub(crate) fn new_unchecked(levels: Vec<u32>, indices: Vec<u32>) -> Self {
        Self { levels, indices }
    }

    /// The constant function, `l = i = (1, …, 1)`.
    pub fn root(dim: usize) -> Self {
        Self { levels: vec![1; dim], indices: vec![1; dim] }
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn level_sum(&self) -> u32 {
        self.levels.iter().sum()
    }

    pub fn is_root(&self) -> bool {
        self.levels.iter().all(|&l| l == 1)
    }

    /// The two children in direction `j`, at level `l + e_j` with index
    /// `2i_j ∓ 1`.
    pub fn children(&self, j: usize) -> [BasisKey; 2] {
        let mut levels = self.levels.clone();
        levels[j] += 1;
        let mut left = self.indices.clone();
        let mut right = self.indices.clone();
        left[j] = 2 * self.indices[j] - 1;
        right[j] = 2 * self.indices[j] + 1;
        [
            BasisKey { levels: levels.clone(), indices: left },
            BasisKey { levels, indices: right },
        ]
    }

    /// The parent in direction `j`, or `None` when `l_j = 1`.
    pub fn parent(&self, j: usize) -> Option<BasisKey> {
        if self.levels[j] <= 1 {
            return None;
        }
        let mut levels = self.levels.clone();
        levels[j] -= 1;
        let mut indices = self.indices.clone();
        let i = self.indices[j];
        indices[j] = if i.div_ceil(2) % 2 == 1 { i.div_ceil(2) } else { (i - 1) / 2 };
        Some(BasisKey { levels, indices })
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        let mut v = 1.0;
        for ((&l, &i), &x) in self.levels.iter().zip(&self.indices).zip(t) {
            v *= eval_1d(l, i, x);
            if v == 0.0 {
                break;
            }
        }
        v
    }
}

impl fmt::Debug for BasisKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l={:?} i={:?}", self.levels, self.indices)
    }
}

#[inline]
pub(crate) fn eval_1d(level: u32, index: u32, t: f64) -> f64 {
    if level == 1 {
        return 1.0;
    }
    let scale = (1u64 << level) as f64;
    let last = (1u32 << level) - 1;
    if index == 1 {
        (2.0 - scale * t).max(0.0)
    } else if index == last {
        (2.0 - scale * (1.0 - t)).max(0.0)
    } else {
        (1.0 - (scale * t - index as f64).abs()).max(0.0)
    }
}

/// The only odd index at `level` whose support can contain `t` in its interior.
#[inline]
pub(crate) fn candidate_index(level: u32, t: f64) -> u32 {
    if level == 1 {
        return 1;
    }
    let scale = (1u64 << level) as f64;
    let last = (1u32 << level) - 1;
    let cell = (scale * t / 2.0).floor().max(0.0) as u64;
    ((2 * cell + 1).min(last as u64)) as u32
}

/// `γ_{l,i}(t)` of the modified linear basis.
pub fn basis_1d(level: u32, index: u32, t: f64) -> Result<f64> {
    if !valid_1d(level, index) {
        return Err(Error::InvalidBasisKey { level, index });
    }
    Ok(eval_1d(level, index, t))
}

/// Tensor-product basis function `γ_{l,i}(t) = Π_j γ_{l_j,i_j}(t_j)`.
pub fn basis_eval(key: &BasisKey, t: &[f64]) -> Result<f64> {
    if key.dim() != t.len() {
        return Err(Error::DimensionMismatch { expected: key.dim(), got: t.len() });
    }
    Ok(key.eval(t))
}
