//! Rotation search on the Stiefel manifold.

mod optimizer;
mod stiefel;

pub use optimizer::{
    cg_run, fd_gradient, line_search, optimize, LineSearchConfig, OptimizationResult, OptimizerConfig, RunRecord,
    StopReason,
};
pub use stiefel::{
    parallel_transport, retract, retraction_differential, StiefelPoint, TangentDirection, FRAME_TOLERANCE,
};
