//! Averaged NRMSE over random train/test splits for a grid of settings.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::run::{fit_grid, fit_rotation};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::sparse_grid::RefinementMode;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub splits: usize,
    /// Share of points used for training in each split.
    pub train_fraction: f64,
    pub lambdas: Vec<f64>,
    pub modes: Vec<RefinementMode>,
    /// Also run every cell without the rotation.
    pub include_baseline: bool,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            splits: 20,
            train_fraction: 0.5,
            lambdas: vec![1e-2, 1e-4, 1e-6],
            modes: vec![RefinementMode::Standard, RefinementMode::Anova],
            include_baseline: false,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// `rotated` or `identity`.
    pub transform: String,
    pub mode: RefinementMode,
    pub lambda: f64,
    pub splits: usize,
    pub mean_nrmse: f64,
    /// Sample standard deviation over splits.
    pub std_nrmse: f64,
    pub mean_grid_points: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_HEADER: &str = "transform,mode,lambda,splits,mean_nrmse,std_nrmse,mean_grid_points";

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut s = format!("{SWEEP_HEADER}\n");
        for r in &self.rows {
            writeln!(
                s,
                "{},{},{:?},{},{:?},{:?},{:?}",
                r.transform, r.mode, r.lambda, r.splits, r.mean_nrmse, r.std_nrmse, r.mean_grid_points
            )
            .unwrap();
        }
        s
    }
}

/// Index sets of split `s`: a seeded shuffle cut at `train_fraction`.
pub fn random_split(n: usize, train_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = ((n as f64 * train_fraction).round() as usize).clamp(1, n.saturating_sub(1).max(1));
    let test = idx.split_off(cut);
    (idx, test)
}

/// Runs every (transform, mode, λ) cell on every split. The surrogate and
/// rotation depend only on the training half, so they are computed once
/// per split and shared by all cells.
pub fn sweep(data: &Dataset, base: &PipelineConfig, cfg: &SweepConfig) -> Result<SweepTable> {
    if cfg.splits == 0 || cfg.lambdas.is_empty() || cfg.modes.is_empty() || !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
        return Err(Error::Config(format!("invalid sweep settings: {cfg:?}")));
    }
    if data.len() < 2 {
        return Err(Error::EmptyDataset);
    }
    let mut transforms = vec![false];
    if cfg.include_baseline {
        transforms.push(true);
    }
    // results[transform][mode][lambda] = (nrmse, grid points) per split
    let mut results = vec![vec![vec![Vec::with_capacity(cfg.splits); cfg.lambdas.len()]; cfg.modes.len()]; transforms.len()];
    for s in 0..cfg.splits {
        let (tr, te) = random_split(data.len(), cfg.train_fraction, cfg.seed.wrapping_add(s as u64));
        let train = data.select(&tr)?;
        let test = data.select(&te)?;
        for (ti, &baseline) in transforms.iter().enumerate() {
            let stage = fit_rotation(&train, &PipelineConfig { baseline, ..base.clone() })?;
            for (mi, &mode) in cfg.modes.iter().enumerate() {
                for (li, &lambda) in cfg.lambdas.iter().enumerate() {
                    let cell = PipelineConfig { baseline, mode, lambda, ..base.clone() };
                    let (model, trace) = fit_grid(&train, &test, &stage, &cell)?;
                    results[ti][mi][li].push((trace.nrmse, model.grid.len()));
                }
            }
        }
    }
    let mut rows = Vec::new();
    for (ti, &baseline) in transforms.iter().enumerate() {
        for (mi, &mode) in cfg.modes.iter().enumerate() {
            for (li, &lambda) in cfg.lambdas.iter().enumerate() {
                let cell = &results[ti][mi][li];
                let n = cell.len() as f64;
                let mean = cell.iter().map(|c| c.0).sum::<f64>() / n;
                let var = if cell.len() > 1 {
                    cell.iter().map(|c| (c.0 - mean) * (c.0 - mean)).sum::<f64>() / (n - 1.0)
                } else {
                    0.0
                };
                rows.push(SweepRow {
                    transform: if baseline { "identity" } else { "rotated" }.to_string(),
                    mode,
                    lambda,
                    splits: cell.len(),
                    mean_nrmse: mean,
                    std_nrmse: var.sqrt(),
                    mean_grid_points: cell.iter().map(|c| c.1 as f64).sum::<f64>() / n,
                });
            }
        }
    }
    Ok(SweepTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_partition_the_indices() {
        let (a, b) = random_split(11, 0.5, 3);
        assert_eq!(a.len() + b.len(), 11);
        let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..11).collect::<Vec<_>>());
        assert_eq!(random_split(11, 0.5, 3), (a, b));
        assert_ne!(random_split(11, 0.5, 4).0, random_split(11, 0.5, 3).0);
    }

    #[test]
    fn small_sweep_emits_every_cell() {
        let (train, _) = crate::pipeline::generate_ridge_2d(200, 1e-8, 1).unwrap();
        let base = PipelineConfig { max_points: 30, opt_restarts: 1, ..PipelineConfig::default() };
        let cfg = SweepConfig { splits: 2, lambdas: vec![1e-2, 1e-4], include_baseline: true, ..SweepConfig::default() };
        let table = sweep(&train, &base, &cfg).unwrap();
        assert_eq!(table.rows.len(), 2 * 2 * 2);
        let csv = table.to_csv();
        assert!(csv.starts_with(SWEEP_HEADER));
        assert_eq!(csv.lines().count(), 9);
        assert!(table.rows.iter().all(|r| r.splits == 2 && r.mean_nrmse.is_finite()));
    }
}
