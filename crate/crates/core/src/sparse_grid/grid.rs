use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::basis::BasisKey;
use crate::error::{Error, Result};

/// A hierarchically closed set of basis functions with coefficients.
///
/// Closure: for every key and every direction `j` with `l_j > 1`, the parent
/// in direction `j` is present. The root is always present.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveGrid {
    dim: usize,
    keys: BTreeMap<BasisKey, f64>,
    fitted: bool,
}

impl AdaptiveGrid {
    /// Grid holding only the constant function.
    pub fn root_only(dim: usize) -> Self {
        let mut keys = BTreeMap::new();
        keys.insert(BasisKey::root(dim), 0.0);
        Self { dim, keys, fitted: false }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn is_fitted(&self) -> bool {
        self.fitted
    }

    pub fn contains(&self, key: &BasisKey) -> bool {
        self.keys.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &BasisKey> {
        self.keys.keys()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BasisKey, f64)> {
        self.keys.iter().map(|(k, &v)| (k, v))
    }

    pub fn coefficient(&self, key: &BasisKey) -> Option<f64> {
        self.keys.get(key).copied()
    }

    /// Coefficients in key order.
    pub fn coefficients(&self) -> Vec<f64> {
        self.keys.values().copied().collect()
    }

    pub fn set_coefficients(&mut self, beta: &[f64]) {
        assert_eq!(beta.len(), self.keys.len());
        for (v, &b) in self.keys.values_mut().zip(beta) {
            *v = b;
        }
        self.fitted = true;
    }

    /// Inserts `key` with coefficient 0 together with any missing ancestors.
    /// Returns the number of keys added.
    pub fn insert_closed(&mut self, key: BasisKey) -> usize {
        if self.keys.contains_key(&key) {
            return 0;
        }
        let mut added = 0;
        for j in 0..key.dim() {
            if let Some(p) = key.parent(j) {
                added += self.insert_closed(p);
            }
        }
        self.keys.insert(key, 0.0);
        added + 1
    }

    pub(crate) fn remove(&mut self, key: &BasisKey) {
        self.keys.remove(key);
    }

    pub(crate) fn mark_unfitted(&mut self) {
        self.fitted = false;
    }

    pub fn is_closed(&self) -> bool {
        self.keys.contains_key(&BasisKey::root(self.dim))
            && self
                .keys
                .keys()
                .all(|k| (0..self.dim).filter_map(|j| k.parent(j)).all(|p| self.keys.contains_key(&p)))
    }

    /// `Σ β_{l,i} γ_{l,i}(t)`.
    pub fn evaluate(&self, t: &[f64]) -> Result<f64> {
        if t.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: t.len() });
        }
        Ok(self.keys.iter().filter(|(_, &b)| b != 0.0).map(|(k, &b)| b * k.eval(t)).sum())
    }

    /// Line-based text form: a header `grid <dim> <count>` followed by one
    /// `l₁ … l_k | i₁ … i_k | β` line per key.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "grid {} {}", self.dim, self.keys.len()).unwrap();
        for (k, b) in &self.keys {
            let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
            writeln!(s, "{} | {} | {:?}", join(k.levels()), join(k.indices()), b).unwrap();
        }
        s
    }

    /// Parses [`to_text`](Self::to_text) output. Line numbers in errors are
    /// relative to `offset`.
    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_lines(text.lines(), 0)
    }

    pub(crate) fn from_lines<'a, I: Iterator<Item = &'a str>>(mut lines: I, offset: usize) -> Result<Self> {
        let perr = |line: usize, msg: &str| Error::Parse { line: offset + line, msg: msg.to_string() };
        let header = lines.next().ok_or_else(|| perr(1, "missing grid header"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "grid" {
            return Err(perr(1, "expected `grid <dim> <count>`"));
        }
        let dim: usize = fields[1].parse().map_err(|_| perr(1, "bad dimension"))?;
        let count: usize = fields[2].parse().map_err(|_| perr(1, "bad key count"))?;
        let mut keys = BTreeMap::new();
        for n in 0..count {
            let line_no = n + 2;
            let line = lines.next().ok_or_else(|| perr(line_no, "missing key line"))?;
            let parts: Vec<&str> = line.split('|').collect();
            if parts.len() != 3 {
                return Err(perr(line_no, "expected `levels | indices | coefficient`"));
            }
            let ints = |s: &str| -> Result<Vec<u32>> {
                s.split_whitespace().map(|v| v.parse().map_err(|_| perr(line_no, "bad integer"))).collect()
            };
            let levels = ints(parts[0])?;
            let indices = ints(parts[1])?;
            if levels.len() != dim || indices.len() != dim {
                return Err(perr(line_no, "wrong key dimension"));
            }
            let beta: f64 = parts[2].trim().parse().map_err(|_| perr(line_no, "bad coefficient"))?;
            let key = BasisKey::new(levels, indices).map_err(|e| perr(line_no, &e.to_string()))?;
            keys.insert(key, beta);
        }
        let grid = Self { dim, keys, fitted: true };
        if !grid.is_closed() {
            return Err(perr(1, "grid is not hierarchically closed"));
        }
        Ok(grid)
    }
}

/// Regular sparse grid of the given level: all keys with
/// `|l|₁ ≤ level + dim − 1` and every admissible odd index.
pub fn regular_grid(dim: usize, level: u32) -> Result<AdaptiveGrid> {
    if level == 0 || dim == 0 {
        return Err(Error::Config(format!("regular grid needs dim ≥ 1 and level ≥ 1, got {dim}, {level}")));
    }
    let budget = level + dim as u32 - 1;
    let mut grid = AdaptiveGrid::root_only(dim);
    let mut levels = vec![1u32; dim];
    fill_levels(&mut grid, &mut levels, 0, budget);
    Ok(grid)
}

fn fill_levels(grid: &mut AdaptiveGrid, levels: &mut Vec<u32>, pos: usize, budget: u32) {
    if pos == levels.len() {
        if levels.iter().sum::<u32>() <= budget {
            let mut indices = vec![1u32; levels.len()];
            fill_indices(grid, levels, &mut indices, 0);
        }
        return;
    }
    let used: u32 = levels[..pos].iter().sum::<u32>() + (levels.len() - pos - 1) as u32;
    for l in 1..=budget.saturating_sub(used) {
        levels[pos] = l;
        fill_levels(grid, levels, pos + 1, budget);
    }
    levels[pos] = 1;
}

fn fill_indices(grid: &mut AdaptiveGrid, levels: &[u32], indices: &mut Vec<u32>, pos: usize) {
    if pos == levels.len() {
        grid.keys.insert(BasisKey::new_unchecked(levels.to_vec(), indices.clone()), 0.0);
        return;
    }
    for i in (1..(1u32 << levels[pos])).step_by(2) {
        indices[pos] = i;
        fill_indices(grid, levels, indices, pos + 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_grid_sizes() {
        assert_eq!(regular_grid(2, 1).unwrap().len(), 1);
        assert_eq!(regular_grid(1, 2).unwrap().len(), 3);
        assert_eq!(regular_grid(2, 4).unwrap().len(), 49);
        assert_eq!(regular_grid(2, 3).unwrap().len(), 17);
        assert!(regular_grid(3, 3).unwrap().is_closed());
        assert!(regular_grid(2, 0).is_err());
    }

    #[test]
    fn regular_grid_matches_level_sum_count() {
        // oracle: Σ over level vectors with |l|₁ ≤ level+d−1 of Π 2^{l_j − 1}
        fn count(d: usize, budget: u32) -> usize {
            if d == 0 {
                return 1;
            }
            (1..=budget.saturating_sub(d as u32 - 1))
                .map(|l| (1usize << (l - 1)) * count(d - 1, budget - l))
                .sum()
        }
        for d in 1..5 {
            for level in 1..5 {
                assert_eq!(regular_grid(d, level).unwrap().len(), count(d, level + d as u32 - 1));
            }
        }
    }

    #[test]
    fn closure_insertion() {
        let mut g = AdaptiveGrid::root_only(2);
        let deep = BasisKey::new(vec![3, 2], vec![5, 3]).unwrap();
        let added = g.insert_closed(deep.clone());
        assert!(g.contains(&deep));
        assert!(g.is_closed());
        assert_eq!(added, g.len() - 1);
    }

    #[test]
    fn evaluate_and_text_round_trip() {
        let mut g = regular_grid(2, 2).unwrap();
        let beta: Vec<f64> = (0..g.len()).map(|i| 0.1 * i as f64 + 1.0 / 3.0).collect();
        g.set_coefficients(&beta);
        let back = AdaptiveGrid::from_text(&g.to_text()).unwrap();
        assert_eq!(back, g);
        let t = [0.3, 0.8];
        assert_eq!(back.evaluate(&t).unwrap(), g.evaluate(&t).unwrap());

        let mut root = AdaptiveGrid::root_only(3);
        root.set_coefficients(&[3.0]);
        assert_eq!(root.evaluate(&[0.1, 0.5, 0.9]).unwrap(), 3.0);
        assert_eq!(regular_grid(2, 3).unwrap().evaluate(&t).unwrap(), 0.0);
        assert!(root.evaluate(&[0.1]).is_err());
    }

    #[test]
    fn unclosed_text_rejected() {
        let text = "grid 1 2\n1 | 1 | 0.0\n3 | 1 | 1.0\n";
        assert!(AdaptiveGrid::from_text(text).is_err());
    }
}
