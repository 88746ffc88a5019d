use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::model::{predict_transformed, FittedModel};
use super::transform::{nrmse, transform_dataset, Standardization};
use crate::anova::{objective, Polynomial};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::rotation::{optimize, StiefelPoint};
use crate::sparse_grid::adaptive_fit_observed;
use crate::surrogate::fit_polynomial;

/// One adaptive-loop solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub grid_points: usize,
    pub train_rmse: f64,
    pub test_nrmse: f64,
    pub cg_iterations: usize,
    /// Whether CG reached the configured reduction.
    pub cg_converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    /// Test NRMSE of the returned model.
    pub nrmse: f64,
    pub objective_value: Option<f64>,
    pub optimizer_iterations: usize,
    pub saturated: bool,
    /// Wall-clock milliseconds per stage.
    pub timings_ms: BTreeMap<String, f64>,
}

impl RunTrace {
    /// `iteration,grid_points,train_rmse,test_nrmse` rows. Timings and CG
    /// statistics are left out so the file is a plain learning curve.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iteration,grid_points,train_rmse,test_nrmse\n");
        for r in &self.records {
            writeln!(s, "{},{},{:?},{:?}", r.iteration, r.grid_points, r.train_rmse, r.test_nrmse).unwrap();
        }
        s
    }
}

/// Summary written next to a fitted or evaluated model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub nrmse: f64,
    pub grid_points: usize,
    pub iterations: usize,
    pub stage_timings_ms: BTreeMap<String, f64>,
    pub objective_value: Option<f64>,
    pub q_matrix: Vec<Vec<f64>>,
}

impl Metrics {
    pub fn from_run(model: &FittedModel, trace: &RunTrace) -> Self {
        Self {
            nrmse: trace.nrmse,
            grid_points: model.grid.len(),
            iterations: trace.records.len(),
            stage_timings_ms: trace.timings_ms.clone(),
            objective_value: trace.objective_value,
            q_matrix: q_rows(&model.q),
        }
    }

    /// Metrics of a stored model on a labelled dataset.
    pub fn evaluate(model: &FittedModel, data: &Dataset) -> Result<Self> {
        let start = Instant::now();
        let value = model.nrmse(data)?;
        let mut timings = BTreeMap::new();
        timings.insert("evaluate".to_string(), elapsed_ms(start));
        let objective_value = match &model.surrogate {
            Some(p) => Some(objective(p, &model.q, model.q.k())?),
            None => None,
        };
        Ok(Self {
            nrmse: value,
            grid_points: model.grid.len(),
            iterations: 0,
            stage_timings_ms: timings,
            objective_value,
            q_matrix: q_rows(&model.q),
        })
    }
}

fn q_rows(q: &StiefelPoint) -> Vec<Vec<f64>> {
    let m = q.matrix();
    (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Output of the surrogate and rotation steps, reusable across grid fits
/// on the same training data.
#[derive(Clone, Debug)]
pub struct RotationStage {
    pub standardization: Option<Standardization>,
    pub surrogate: Option<Polynomial>,
    pub q: StiefelPoint,
    pub objective_value: Option<f64>,
    pub optimizer_iterations: usize,
    pub timings_ms: BTreeMap<String, f64>,
}

/// Fits the polynomial surrogate and searches for the frame `Q`, or uses
/// `Q = I_d` in baseline mode.
pub fn fit_rotation(train: &Dataset, cfg: &PipelineConfig) -> Result<RotationStage> {
    let d = train.dim();
    cfg.validate(d)?;
    let standardization = cfg.standardize.then(|| Standardization::fit(train));
    let mut timings_ms = BTreeMap::new();
    if cfg.baseline {
        return Ok(RotationStage {
            standardization,
            surrogate: None,
            q: StiefelPoint::identity(d, d)?,
            objective_value: None,
            optimizer_iterations: 0,
            timings_ms,
        });
    }
    let start = Instant::now();
    let surrogate = match &standardization {
        Some(s) => fit_polynomial(&s.apply(train)?, cfg.degree)?,
        None => fit_polynomial(train, cfg.degree)?,
    };
    timings_ms.insert("surrogate".into(), elapsed_ms(start));

    let start = Instant::now();
    let result = optimize(&surrogate, cfg.resolved_k(d), &cfg.optimizer_config())?;
    timings_ms.insert("rotation".into(), elapsed_ms(start));
    Ok(RotationStage {
        standardization,
        surrogate: Some(surrogate),
        q: result.frame,
        objective_value: Some(result.value),
        optimizer_iterations: result.runs.iter().map(|r| r.iterations).sum(),
        timings_ms,
    })
}

/// Rescales both sets through the stage's frame and runs the adaptive
/// sparse-grid fit, tracking the test NRMSE after every solve.
pub fn fit_grid(
    train: &Dataset,
    test: &Dataset,
    stage: &RotationStage,
    cfg: &PipelineConfig,
) -> Result<(FittedModel, RunTrace)> {
    let mut timings_ms = stage.timings_ms.clone();
    let start = Instant::now();
    let rescale = |data: &Dataset| -> Result<Dataset> {
        match &stage.standardization {
            Some(s) => transform_dataset(&s.apply(data)?, &stage.q, cfg.clamp),
            None => transform_dataset(data, &stage.q, cfg.clamp),
        }
    };
    let z_train = rescale(train)?;
    let z_test = rescale(test)?;
    timings_ms.insert("transform".into(), elapsed_ms(start));

    let start = Instant::now();
    let fit = adaptive_fit_observed(&z_train, &cfg.adaptive_params(), |grid| {
        predict_transformed(grid, &z_test).and_then(|f| nrmse(&f, z_test.targets())).ok()
    })?;
    timings_ms.insert("sparse_grid".into(), elapsed_ms(start));

    let records: Vec<TraceRecord> = fit
        .trace
        .iter()
        .map(|r| TraceRecord {
            iteration: r.iteration,
            grid_points: r.grid_points,
            train_rmse: r.train_rmse,
            test_nrmse: r.test_metric.unwrap_or(f64::NAN),
            cg_iterations: r.cg.iterations,
            cg_converged: r.cg.converged,
        })
        .collect();
    let model = FittedModel {
        config: cfg.clone(),
        q: stage.q.clone(),
        grid: fit.grid,
        surrogate: stage.surrogate.clone(),
        standardization: stage.standardization.clone(),
    };
    let final_nrmse = match records.last() {
        Some(r) if r.test_nrmse.is_finite() => r.test_nrmse,
        _ => nrmse(&predict_transformed(&model.grid, &z_test)?, z_test.targets())?,
    };
    let trace = RunTrace {
        records,
        nrmse: final_nrmse,
        objective_value: stage.objective_value,
        optimizer_iterations: stage.optimizer_iterations,
        saturated: fit.saturated,
        timings_ms,
    };
    Ok((model, trace))
}

/// Surrogate fit, rotation, rescaling and adaptive sparse-grid fit.
pub fn run_pipeline(train: &Dataset, test: &Dataset, cfg: &PipelineConfig) -> Result<(FittedModel, RunTrace)> {
    let stage = fit_rotation(train, cfg)?;
    fit_grid(train, test, &stage, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::generate_ridge_2d;
    use crate::sparse_grid::{adaptive_fit, RefinementMode};

    #[test]
    fn baseline_equals_plain_adaptive_fit() {
        let (train, test) = generate_ridge_2d(400, 1e-8, 4).unwrap();
        let cfg = PipelineConfig { baseline: true, max_points: 60, ..PipelineConfig::default() };
        let (model, trace) = run_pipeline(&train, &test, &cfg).unwrap();
        let direct = adaptive_fit(&transform_dataset(&train, &StiefelPoint::identity(2, 2).unwrap(), cfg.clamp).unwrap(), &cfg.adaptive_params()).unwrap();
        assert_eq!(model.grid, direct.grid);
        assert!(trace.records.windows(2).all(|w| w[0].grid_points < w[1].grid_points));
        assert_eq!(trace.nrmse, model.nrmse(&test).unwrap());
    }

    #[test]
    fn rotated_run_is_deterministic() {
        let (train, test) = generate_ridge_2d(300, 1e-8, 2).unwrap();
        let cfg = PipelineConfig { max_points: 40, mode: RefinementMode::Anova, opt_restarts: 2, ..PipelineConfig::default() };
        let (m1, t1) = run_pipeline(&train, &test, &cfg).unwrap();
        let (m2, t2) = run_pipeline(&train, &test, &cfg).unwrap();
        assert_eq!(t1.to_csv(), t2.to_csv());
        assert_eq!(m1, m2);
        assert!(t1.to_csv().starts_with("iteration,grid_points,train_rmse,test_nrmse\n"));
        let metrics = Metrics::from_run(&m1, &t1);
        let json = serde_json::to_value(&metrics).unwrap();
        for key in ["nrmse", "grid_points", "iterations", "stage_timings_ms", "objective_value", "q_matrix"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}
