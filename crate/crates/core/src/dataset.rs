use crate::error::{Error, Result};

/// `N` samples `(t_i, x_i)` with `t_i ∈ R^d`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    dim: usize,
    points: Vec<f64>,
    targets: Vec<f64>,
}

impl Dataset {
    pub fn new(dim: usize, points: Vec<f64>, targets: Vec<f64>) -> Result<Self> {
        if dim == 0 || targets.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if points.len() != dim * targets.len() {
            return Err(Error::DimensionMismatch { expected: dim * targets.len(), got: points.len() });
        }
        if points.iter().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, points, targets })
    }

    pub fn from_rows(rows: &[Vec<f64>], targets: Vec<f64>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: rows.iter().map(Vec::len).find(|&l| l != dim).unwrap_or(0) });
        }
        Self::new(dim, rows.concat(), targets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    pub fn raw_points(&self) -> &[f64] {
        &self.points
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// A new dataset with the rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Dataset> {
        let mut pts = Vec::with_capacity(indices.len() * self.dim);
        let mut tg = Vec::with_capacity(indices.len());
        for &i in indices {
            pts.extend_from_slice(self.point(i));
            tg.push(self.targets[i]);
        }
        Dataset::new(self.dim, pts, tg)
    }

    /// Same points, different targets.
    pub fn with_targets(&self, targets: Vec<f64>) -> Result<Dataset> {
        Dataset::new(self.dim, self.points.clone(), targets)
    }
}
