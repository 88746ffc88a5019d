use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rotation::{LineSearchConfig, OptimizerConfig};
use crate::sparse_grid::{AdaptiveParams, FitConfig, RefinementMode, ThresholdScale};

/// Every knob of the rotate-then-regress pipeline.
///
/// `truncation = None` resolves to `min(d, 3)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub degree: u32,
    pub truncation: Option<usize>,
    pub initial_level: u32,
    pub threshold: f64,
    pub threshold_scale: ThresholdScale,
    pub refine_count: usize,
    pub max_points: usize,
    pub mode: RefinementMode,
    pub lambda: f64,
    pub cg_reduction: f64,
    pub cg_max_iters: usize,
    pub opt_max_iters: usize,
    pub opt_restarts: usize,
    pub fd_step: f64,
    pub grad_tol: f64,
    pub seed: u64,
    /// Outputs of the normal CDF are clipped to `[clamp, 1 − clamp]`.
    pub clamp: f64,
    /// Z-score each input coordinate with training statistics first.
    pub standardize: bool,
    /// Skip the rotation: `Q = I_d`, the grid lives on all `d` coordinates.
    pub baseline: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let fit = FitConfig::default();
        let opt = OptimizerConfig::default();
        Self {
            degree: 3,
            truncation: None,
            initial_level: 3,
            threshold: 0.1,
            threshold_scale: ThresholdScale::Raw,
            refine_count: 10,
            max_points: 500,
            mode: RefinementMode::Standard,
            lambda: fit.lambda,
            cg_reduction: fit.cg_reduction,
            cg_max_iters: fit.cg_max_iters,
            opt_max_iters: opt.max_iters,
            opt_restarts: opt.restarts,
            fd_step: opt.fd_step,
            grad_tol: opt.grad_tol,
            seed: 0,
            clamp: 1e-12,
            standardize: false,
            baseline: false,
        }
    }
}

impl PipelineConfig {
    /// Grid dimension for inputs of dimension `d`.
    pub fn resolved_k(&self, d: usize) -> usize {
        if self.baseline {
            d
        } else {
            self.truncation.unwrap_or(d.min(3))
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        let k = self.resolved_k(d);
        if k == 0 || k > d {
            return Err(Error::InvalidShape { d, k });
        }
        if self.degree == 0 {
            return Err(Error::Config("surrogate degree must be at least 1".into()));
        }
        if !(self.clamp > 0.0 && self.clamp < 0.5) {
            return Err(Error::Config(format!("clamp must lie in (0, 0.5), got {}", self.clamp)));
        }
        self.adaptive_params().validate()?;
        self.optimizer_config().validate()
    }

    pub fn fit_config(&self) -> FitConfig {
        FitConfig { lambda: self.lambda, cg_reduction: self.cg_reduction, cg_max_iters: self.cg_max_iters }
    }

    pub fn adaptive_params(&self) -> AdaptiveParams {
        AdaptiveParams {
            initial_level: self.initial_level,
            threshold: self.threshold,
            threshold_scale: self.threshold_scale,
            refine_count: self.refine_count,
            max_points: self.max_points,
            mode: self.mode,
            fit: self.fit_config(),
        }
    }

    pub fn optimizer_config(&self) -> OptimizerConfig {
        OptimizerConfig {
            max_iters: self.opt_max_iters,
            fd_step: self.fd_step,
            grad_tol: self.grad_tol,
            restarts: self.opt_restarts,
            line_search: LineSearchConfig::default(),
            seed: self.seed,
        }
    }
}
