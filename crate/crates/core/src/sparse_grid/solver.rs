use serde::{Deserialize, Serialize};

use super::design::DesignMatrix;
use super::grid::AdaptiveGrid;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Settings of the regularized least-squares solve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Tikhonov weight `λ ≥ 0`.
    pub lambda: f64,
    /// Target ratio `‖r_k‖ / ‖Bᵀx‖`.
    pub cg_reduction: f64,
    pub cg_max_iters: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { lambda: 0.0, cg_reduction: 1e-12, cg_max_iters: 20_000 }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !(self.cg_reduction > 0.0 && self.cg_reduction < 1.0) || self.cg_max_iters == 0 {
            return Err(Error::Config(format!("invalid fit settings: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// Achieved `‖r‖ / ‖Bᵀx‖`.
    pub reduction: f64,
    pub converged: bool,
}

/// Conjugate gradients on `A β = b` for the symmetric positive
/// semi-definite `A = BᵀB + λI`, started from `beta`.
///
/// Stops once `‖b − Aβ‖ ≤ reduction · ‖b‖` (the residual of the zero start,
/// so warm starts do not tighten the target). When `max_iters` runs out
/// first, `beta` holds the last iterate and the report has
/// `converged = false`.
pub fn conjugate_gradient(
    design: &DesignMatrix,
    lambda: f64,
    rhs: &[f64],
    beta: &mut [f64],
    reduction: f64,
    max_iters: usize,
) -> Result<SolveReport> {
    let m = rhs.len();
    let bnorm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        beta.iter_mut().for_each(|b| *b = 0.0);
        return Ok(SolveReport { iterations: 0, reduction: 0.0, converged: true });
    }
    let target = reduction * bnorm;
    let mut scratch = Vec::new();
    let mut ap = vec![0.0; m];
    design.normal_apply(beta, lambda, &mut scratch, &mut ap);
    let mut r: Vec<f64> = rhs.iter().zip(&ap).map(|(b, a)| b - a).collect();
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    let mut p = r.clone();
    let mut it = 0;
    while rr.sqrt() > target {
        if it == max_iters {
            break;
        }
        design.normal_apply(&p, lambda, &mut scratch, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            // p lies in the null space of A; the iterate cannot improve further
            break;
        }
        let alpha = rr / pap;
        for i in 0..m {
            beta[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new: f64 = r.iter().map(|v| v * v).sum();
        let gamma = rr_new / rr;
        for i in 0..m {
            p[i] = r[i] + gamma * p[i];
        }
        rr = rr_new;
        it += 1;
    }
    let reduction = rr.sqrt() / bnorm;
    Ok(SolveReport { iterations: it, reduction, converged: rr.sqrt() <= target })
}

/// Solves `(BᵀB + λI)β = Bᵀx` for the grid's coefficients by CG, warm
/// started from the coefficients currently stored in the grid. Fails with
/// [`Error::CgNotConverged`], leaving the grid untouched, when the target
/// reduction is not reached.
pub fn solve_ls(grid: &mut AdaptiveGrid, data: &Dataset, cfg: &FitConfig) -> Result<SolveReport> {
    let design = DesignMatrix::assemble(grid, data)?;
    let mut trial = grid.clone();
    let report = solve_with_design(&mut trial, &design, data, cfg)?;
    if !report.converged {
        return Err(Error::CgNotConverged { iterations: report.iterations, achieved: report.reduction });
    }
    *grid = trial;
    Ok(report)
}

/// Like [`solve_ls`] but keeps the last iterate when CG stops early.
pub(crate) fn solve_with_design(
    grid: &mut AdaptiveGrid,
    design: &DesignMatrix,
    data: &Dataset,
    cfg: &FitConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    if grid.is_empty() {
        return Err(Error::Config("cannot fit an empty grid".into()));
    }
    let rhs = design.apply_transpose(data.targets());
    let mut beta = grid.coefficients();
    let report = conjugate_gradient(design, cfg.lambda, &rhs, &mut beta, cfg.cg_reduction, cfg.cg_max_iters)?;
    grid.set_coefficients(&beta);
    Ok(report)
}
