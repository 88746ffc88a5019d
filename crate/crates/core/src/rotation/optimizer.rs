//! Nonlinear conjugate gradient ascent of `M̂_p` on `V_k(R^d)`.
//!
//! One iteration performs a backtracking line search along the QR
//! retraction, moves to the new frame, forms the Polak-Ribière coefficient,
//! transports the previous direction and combines it with the new gradient.
//! Gradients are forward differences of the objective in the ambient space
//! `R^{d×k}`; directions use their tangent projection so that every search
//! direction is an ascent direction along the retraction.

use serde::{Deserialize, Serialize};

use super::stiefel::{parallel_transport, retract, retraction_differential, StiefelPoint, TangentDirection};
use crate::anova::{total_variance, AnovaObjective, Polynomial};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineSearchConfig {
    pub initial_step: f64,
    pub shrink: f64,
    pub max_halvings: usize,
    pub sufficient_increase: f64,
}

impl Default for LineSearchConfig {
    fn default() -> Self {
        Self { initial_step: 1.0, shrink: 0.5, max_halvings: 30, sufficient_increase: 1e-4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    pub fd_step: f64,
    pub grad_tol: f64,
    pub restarts: usize,
    pub line_search: LineSearchConfig,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            fd_step: 1e-6,
            grad_tol: 1e-8,
            restarts: 5,
            line_search: LineSearchConfig::default(),
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let ls = &self.line_search;
        let ok = self.max_iters > 0
            && self.fd_step > 0.0
            && self.grad_tol > 0.0
            && self.restarts > 0
            && ls.initial_step > 0.0
            && ls.shrink > 0.0
            && ls.shrink < 1.0
            && ls.max_halvings > 0
            && ls.sufficient_increase > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid optimizer settings: {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    GradientTolerance,
    MaxIterations,
    /// No step was accepted even along the steepest ascent direction.
    Stalled,
}

/// History of one CG run.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub start: StiefelPoint,
    /// Objective at the start and after every accepted step.
    pub values: Vec<f64>,
    /// `‖QᵀQ − I‖_F` of every iterate, aligned with `values`.
    pub defects: Vec<f64>,
    pub iterations: usize,
    pub stop: StopReason,
    pub best: StiefelPoint,
    pub best_value: f64,
}

#[derive(Clone, Debug)]
pub struct OptimizationResult {
    pub frame: StiefelPoint,
    pub value: f64,
    pub runs: Vec<RunRecord>,
}

/// Forward-difference gradient of `M̂_p` in `R^{d×k}`, using `kd + 1`
/// objective evaluations at the raw perturbed matrices `Q + h·E_ij`.
pub fn fd_gradient(p: &Polynomial, q: &StiefelPoint, h: f64) -> Result<TangentDirection> {
    let obj = AnovaObjective::new(p, q.k())?;
    if q.d() != obj.n_vars() {
        return Err(Error::DimensionMismatch { expected: obj.n_vars(), got: q.d() });
    }
    let base = obj.value_unchecked(q.matrix());
    Ok(fd_gradient_with(&obj, q, base, h))
}

pub(crate) fn fd_gradient_with(obj: &AnovaObjective, q: &StiefelPoint, base: f64, h: f64) -> TangentDirection {
    let mut work = q.matrix().clone();
    let mut grad = nalgebra::DMatrix::zeros(q.d(), q.k());
    for j in 0..q.k() {
        for i in 0..q.d() {
            let orig = work[(i, j)];
            work[(i, j)] = orig + h;
            grad[(i, j)] = (obj.value_unchecked(&work) - base) / h;
            work[(i, j)] = orig;
        }
    }
    TangentDirection::new(grad)
}

/// Backtracking search for a step `δ` along the retraction curve
/// `δ ↦ qf(Q + δM)`.
///
/// Starting at the configured initial step, `δ` shrinks until
/// `M̂(qf(Q + δM)) ≥ M̂(Q) + c·δ·slope`, where the slope is the directional
/// derivative of `M̂` along the curve. Returns 0 when `M` is not an ascent
/// direction or no step is accepted.
pub fn line_search(p: &Polynomial, q: &StiefelPoint, m: &TangentDirection, cfg: &OptimizerConfig) -> Result<f64> {
    let obj = AnovaObjective::new(p, q.k())?;
    let f0 = obj.value_unchecked(q.matrix());
    let g = fd_gradient_with(&obj, q, f0, cfg.fd_step);
    Ok(line_search_with(&obj, q, m, f0, &g, &cfg.line_search).map_or(0.0, |(d, _, _)| d))
}

// Returns the accepted step with the new frame and its objective value.
fn line_search_with(
    obj: &AnovaObjective,
    q: &StiefelPoint,
    m: &TangentDirection,
    f0: f64,
    grad: &TangentDirection,
    cfg: &LineSearchConfig,
) -> Option<(f64, StiefelPoint, f64)> {
    let slope = grad.matrix().dot(&retraction_differential(q, m));
    if !(slope > 0.0) {
        return None;
    }
    let mut delta = cfg.initial_step;
    for _ in 0..=cfg.max_halvings {
        if let Ok(next) = retract(q, delta, m) {
            let f = obj.value_unchecked(next.matrix());
            if f >= f0 + cfg.sufficient_increase * delta * slope {
                return Some((delta, next, f));
            }
        }
        delta *= cfg.shrink;
    }
    None
}

/// Runs one CG ascent from `start`.
pub fn cg_run(obj: &AnovaObjective, start: StiefelPoint, cfg: &OptimizerConfig) -> RunRecord {
    let mut q = start.clone();
    let mut f = obj.value_unchecked(q.matrix());
    let mut grad = fd_gradient_with(obj, &q, f, cfg.fd_step);
    let mut tgrad = q.project_tangent(grad.matrix());
    let mut dir = tgrad.clone();
    let mut steepest = true;

    let mut values = vec![f];
    let mut defects = vec![q.orthonormality_defect()];
    let mut stop = StopReason::MaxIterations;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        if tgrad.norm() < cfg.grad_tol {
            stop = StopReason::GradientTolerance;
            break;
        }
        iterations += 1;
        let Some((_, q_next, f_next)) = line_search_with(obj, &q, &dir, f, &grad, &cfg.line_search) else {
            if steepest {
                stop = StopReason::Stalled;
                break;
            }
            dir = tgrad.clone();
            steepest = true;
            continue;
        };

        let grad_next = fd_gradient_with(obj, &q_next, f_next, cfg.fd_step);
        let tgrad_next = q_next.project_tangent(grad_next.matrix());
        let denom = tgrad.dot(&tgrad);
        let beta = if denom > 0.0 {
            (tgrad_next.dot(&tgrad_next) - tgrad_next.dot(&tgrad)) / denom
        } else {
            0.0
        };
        let beta = beta.max(0.0);
        let transported = parallel_transport(&dir, &q_next);
        dir = tgrad_next.scaled_add(beta, &transported);
        steepest = beta == 0.0;

        q = q_next;
        f = f_next;
        grad = grad_next;
        tgrad = tgrad_next;
        values.push(f);
        defects.push(q.orthonormality_defect());
    }

    RunRecord { start, values, defects, iterations, stop, best_value: f, best: q }
}

/// Maximizes `M̂_p` over `V_k(R^d)` with `cfg.restarts` independent runs from
/// seeded random frames, keeping the best.
pub fn optimize(p: &Polynomial, k: usize, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    cfg.validate()?;
    if k == 0 || k > p.n_vars() {
        return Err(Error::InvalidShape { d: p.n_vars(), k });
    }
    if total_variance(p) <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let obj = AnovaObjective::new(p, k)?;
    let mut runs = Vec::with_capacity(cfg.restarts);
    for r in 0..cfg.restarts {
        let start = StiefelPoint::random(p.n_vars(), k, cfg.seed.wrapping_add(r as u64))?;
        runs.push(cg_run(&obj, start, cfg));
    }
    let best = runs
        .iter()
        .max_by(|a, b| a.best_value.total_cmp(&b.best_value))
        .expect("at least one restart");
    Ok(OptimizationResult { frame: best.best.clone(), value: best.best_value, runs })
}
