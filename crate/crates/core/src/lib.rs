//! Adaptive sparse-grid regression in optimally rotated coordinates.
//!
//! A cubic polynomial surrogate of the data picks an orthonormal frame `Q`
//! that concentrates variance on the leading coordinates. The data is then
//! mapped through `C(Qᵀt)`, with `C` the componentwise normal CDF, and fitted
//! by an adaptive sparse grid on the unit cube. See the book in `book/` for a
//! walk through each stage.
//!
//! ```
//! use rotgrid::pipeline::{generate, run_pipeline, PipelineConfig, Problem};
//!
//! let data = generate(Problem::Ridge2d, 600, 1e-8, 1)?;
//! let cfg = PipelineConfig { max_points: 40, ..PipelineConfig::default() };
//! let (model, trace) = run_pipeline(&data.train, &data.test, &cfg)?;
//! assert!(trace.nrmse < 0.1);
//! assert!(model.predict(&[0.0, 0.0])?.abs() < 0.05);
//! # Ok::<(), rotgrid::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anova;
pub mod dataset;
pub mod error;
pub mod pipeline;
pub mod rotation;
pub mod sparse_grid;
pub mod surrogate;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/anova.md")]
    mod anova {}
    #[doc = include_str!("../../../book/src/rotation.md")]
    mod rotation {}
    #[doc = include_str!("../../../book/src/sparse_grids.md")]
    mod sparse_grids {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
