//! End-to-end orchestration: surrogate fit, rotation search, Gaussian-CDF
//! rescaling and adaptive sparse-grid regression, plus file formats.

mod config;
mod generate;
mod io;
mod model;
mod run;
mod sweep;
mod transform;

pub use config::PipelineConfig;
pub use generate::{generate, generate_ridge_2d, generate_ridge_5d, sample_dataset, Generated, Problem};
pub use io::{read_csv, read_csv_from, write_csv, write_csv_to};
pub use model::FittedModel;
pub use run::{fit_grid, fit_rotation, run_pipeline, Metrics, RotationStage, RunTrace, TraceRecord};
pub use sweep::{random_split, sweep, SweepConfig, SweepRow, SweepTable, SWEEP_HEADER};
pub use transform::{gaussian_cdf, normal_cdf, nrmse, transform_dataset, transform_point, Standardization};
