//! Adaptive sparse-grid regression on `[0, 1]^k` with the modified linear
//! hierarchical basis.

mod adapt;
mod basis;
mod design;
mod grid;
mod solver;

pub use adapt::{
    adaptive_fit, adaptive_fit_observed, compress, error_indicator, refine, AdaptiveFit, AdaptiveParams,
    IterationRecord, RefinementMode, ThresholdScale,
};
pub use basis::{basis_1d, basis_eval, BasisKey};
pub use design::{check_unit_cube, dense_design, DesignMatrix};
pub use grid::{regular_grid, AdaptiveGrid};
pub use solver::{conjugate_gradient, solve_ls, FitConfig, SolveReport};

/// `Σ β_{l,i} γ_{l,i}(t)` at a single point.
pub fn evaluate(grid: &AdaptiveGrid, t: &[f64]) -> crate::Result<f64> {
    grid.evaluate(t)
}
