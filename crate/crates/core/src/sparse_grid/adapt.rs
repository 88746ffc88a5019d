//! Error-indicator driven compression and refinement, and the adaptive loop.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::basis::BasisKey;
use super::design::DesignMatrix;
use super::grid::{regular_grid, AdaptiveGrid};
use super::solver::{solve_with_design, FitConfig, SolveReport};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RefinementMode {
    /// Insert children in every direction.
    #[default]
    Standard,
    /// Insert children only in directions already active (`l_j > 1`).
    Anova,
}

impl std::str::FromStr for RefinementMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Self::Standard),
            "anova" => Ok(Self::Anova),
            other => Err(Error::Config(format!("unknown refinement mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for RefinementMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Standard => "standard",
            Self::Anova => "anova",
        })
    }
}

/// How the compression threshold is compared against `|ε|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdScale {
    /// `|ε| < t`.
    #[default]
    Raw,
    /// `|ε| / (N · rms(x)³) < t`, which makes `t` independent of the
    /// sample count and the target magnitude.
    Normalized,
}

impl std::str::FromStr for ThresholdScale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Self::Raw),
            "normalized" => Ok(Self::Normalized),
            other => Err(Error::Config(format!("unknown threshold scale `{other}`"))),
        }
    }
}

/// `ε_{l,i} = β_{l,i} Σ_j γ_{l,i}(t_j) (f(t_j) − x_j)²` in key order.
pub fn error_indicator(grid: &AdaptiveGrid, data: &Dataset) -> Result<BTreeMap<BasisKey, f64>> {
    if !grid.is_fitted() {
        return Err(Error::Unfitted);
    }
    let design = DesignMatrix::assemble(grid, data)?;
    let eps = indicator_with_design(grid, &design, data);
    Ok(grid.keys().cloned().zip(eps).collect())
}

fn indicator_with_design(grid: &AdaptiveGrid, design: &DesignMatrix, data: &Dataset) -> Vec<f64> {
    let beta = grid.coefficients();
    let sq = squared_residuals(design, &beta, data);
    let weights = design.apply_transpose(&sq);
    beta.iter().zip(&weights).map(|(b, w)| b * w).collect()
}

fn squared_residuals(design: &DesignMatrix, beta: &[f64], data: &Dataset) -> Vec<f64> {
    design.apply(beta).iter().zip(data.targets()).map(|(f, x)| (f - x) * (f - x)).collect()
}

fn root_mean_square(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

fn threshold_divisor(scale: ThresholdScale, data: &Dataset) -> f64 {
    match scale {
        ThresholdScale::Raw => 1.0,
        ThresholdScale::Normalized => {
            let rms = root_mean_square(data.targets());
            let d = data.len() as f64 * rms.powi(3);
            if d > 0.0 { d } else { 1.0 }
        }
    }
}

/// Removes keys with `|ε| < threshold` unless a kept descendant needs them.
/// The root always survives. Returns the number of removed keys.
pub fn compress(grid: &mut AdaptiveGrid, threshold: f64, data: &Dataset) -> Result<usize> {
    let eps = error_indicator(grid, data)?;
    Ok(compress_with(grid, &eps, threshold))
}

fn compress_with(grid: &mut AdaptiveGrid, eps: &BTreeMap<BasisKey, f64>, threshold: f64) -> usize {
    let dim = grid.dim();
    let mut order: Vec<&BasisKey> = eps.keys().collect();
    order.sort_by_key(|k| std::cmp::Reverse(k.level_sum()));
    let mut kept: BTreeSet<&BasisKey> = BTreeSet::new();
    let mut removed = Vec::new();
    for key in order {
        let marked = eps[key].abs() < threshold;
        let keep = key.is_root()
            || !marked
            || (0..dim).any(|j| key.children(j).iter().any(|c| kept.contains(c)));
        if keep {
            kept.insert(key);
        } else {
            removed.push(key.clone());
        }
    }
    for key in &removed {
        grid.remove(key);
    }
    if !removed.is_empty() {
        grid.mark_unfitted();
    }
    removed.len()
}

/// Directions in which `key` may receive children under `mode`.
fn refine_directions(grid: &AdaptiveGrid, key: &BasisKey, mode: RefinementMode) -> Vec<usize> {
    let dim = key.dim();
    match mode {
        RefinementMode::Standard => (0..dim).collect(),
        RefinementMode::Anova if key.is_root() => {
            // the root is opened once; afterwards only active directions grow
            let has_children = (0..dim).any(|j| key.children(j).iter().any(|c| grid.contains(c)));
            if has_children { Vec::new() } else { (0..dim).collect() }
        }
        RefinementMode::Anova => (0..dim).filter(|&j| key.levels()[j] > 1).collect(),
    }
}

fn missing_children(grid: &AdaptiveGrid, key: &BasisKey, mode: RefinementMode) -> Vec<BasisKey> {
    refine_directions(grid, key, mode)
        .into_iter()
        .flat_map(|j| key.children(j))
        .filter(|c| !grid.contains(c))
        .collect()
}

/// Inserts the missing children of the `count` refinable keys with the
/// largest `|ε|` (ties broken by key order), plus any ancestors they need.
/// Returns the number of inserted keys, or [`Error::Saturated`] when no key
/// can be refined.
pub fn refine(grid: &mut AdaptiveGrid, count: usize, mode: RefinementMode, data: &Dataset) -> Result<usize> {
    let eps = error_indicator(grid, data)?;
    refine_with(grid, &eps, count, mode)
}

fn refine_with(grid: &mut AdaptiveGrid, eps: &BTreeMap<BasisKey, f64>, count: usize, mode: RefinementMode) -> Result<usize> {
    if count == 0 {
        return Err(Error::Config("refine count must be at least 1".into()));
    }
    let mut candidates: Vec<(&BasisKey, f64, Vec<BasisKey>)> = eps
        .iter()
        .filter_map(|(k, &e)| {
            let missing = missing_children(grid, k, mode);
            (!missing.is_empty()).then_some((k, e.abs(), missing))
        })
        .collect();
    if candidates.is_empty() {
        return Err(Error::Saturated);
    }
    // stable sort keeps key order among equal magnitudes
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut added = 0;
    for (_, _, children) in candidates.into_iter().take(count) {
        for c in children {
            added += grid.insert_closed(c);
        }
    }
    grid.mark_unfitted();
    Ok(added)
}

/// Parameters of the adaptive loop.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveParams {
    pub initial_level: u32,
    pub threshold: f64,
    pub threshold_scale: ThresholdScale,
    pub refine_count: usize,
    /// The loop stops once the grid holds at least this many keys.
    pub max_points: usize,
    pub mode: RefinementMode,
    pub fit: FitConfig,
}

impl Default for AdaptiveParams {
    fn default() -> Self {
        Self {
            initial_level: 3,
            threshold: 0.1,
            threshold_scale: ThresholdScale::Raw,
            refine_count: 10,
            max_points: 500,
            mode: RefinementMode::Standard,
            fit: FitConfig::default(),
        }
    }
}

impl AdaptiveParams {
    pub fn validate(&self) -> Result<()> {
        self.fit.validate()?;
        if self.initial_level == 0 || self.refine_count == 0 || self.max_points == 0 || !(self.threshold >= 0.0) {
            return Err(Error::Config(format!("invalid adaptive settings: {self:?}")));
        }
        Ok(())
    }
}

/// One solve of the adaptive loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub grid_points: usize,
    pub train_rmse: f64,
    /// Value returned by the observer, usually a held-out NRMSE.
    pub test_metric: Option<f64>,
    pub cg: SolveReport,
}

#[derive(Clone, Debug)]
pub struct AdaptiveFit {
    pub grid: AdaptiveGrid,
    pub trace: Vec<IterationRecord>,
    /// Keys removed by the compression step.
    pub compressed: usize,
    pub saturated: bool,
}

impl AdaptiveFit {
    pub fn refinements(&self) -> usize {
        self.trace.len().saturating_sub(1)
    }
}

/// Adaptive fit without an observer.
pub fn adaptive_fit(data: &Dataset, params: &AdaptiveParams) -> Result<AdaptiveFit> {
    adaptive_fit_observed(data, params, |_| None)
}

/// Regular grid of level `l0` → solve → compress → repeat {solve; refine}
/// until the grid holds `max_points` keys or no key can be refined. The
/// grid returned is always fitted. `observe` is called after every solve
/// of the loop.
pub fn adaptive_fit_observed<F>(data: &Dataset, params: &AdaptiveParams, mut observe: F) -> Result<AdaptiveFit>
where
    F: FnMut(&AdaptiveGrid) -> Option<f64>,
{
    params.validate()?;
    let mut grid = regular_grid(data.dim(), params.initial_level)?;
    let design = DesignMatrix::assemble(&grid, data)?;
    solve_with_design(&mut grid, &design, data, &params.fit)?;
    let eps = indicator_with_design(&grid, &design, data);
    let eps: BTreeMap<BasisKey, f64> = grid.keys().cloned().zip(eps).collect();
    let threshold = params.threshold * threshold_divisor(params.threshold_scale, data);
    let compressed = compress_with(&mut grid, &eps, threshold);

    let mut trace = Vec::new();
    let mut saturated = false;
    loop {
        let design = DesignMatrix::assemble(&grid, data)?;
        let cg = solve_with_design(&mut grid, &design, data, &params.fit)?;
        let sq = squared_residuals(&design, &grid.coefficients(), data);
        let train_rmse = (sq.iter().sum::<f64>() / data.len() as f64).sqrt();
        trace.push(IterationRecord {
            iteration: trace.len(),
            grid_points: grid.len(),
            train_rmse,
            test_metric: observe(&grid),
            cg,
        });
        if grid.len() >= params.max_points {
            break;
        }
        let eps = indicator_with_design(&grid, &design, data);
        let eps: BTreeMap<BasisKey, f64> = grid.keys().cloned().zip(eps).collect();
        let fitted = grid.clone();
        match refine_with(&mut grid, &eps, params.refine_count, params.mode) {
            Ok(_) => {}
            Err(Error::Saturated) => {
                grid = fitted;
                saturated = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(AdaptiveFit { grid, trace, compressed, saturated })
}
