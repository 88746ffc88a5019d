use serde::{Deserialize, Serialize};
use libm::erfc;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rotation::StiefelPoint;

/// Standard normal CDF `Φ(x) = erfc(−x/√2) / 2`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Componentwise `Φ`, clipped to `[clamp, 1 − clamp]`. Under `N(0, I)` the
/// `k`-variate CDF factorizes, so this is the rescaling onto `[0, 1]^k`.
pub fn gaussian_cdf(v: &[f64], clamp: f64) -> Result<Vec<f64>> {
    if !(clamp > 0.0 && clamp < 0.5) {
        return Err(Error::Config(format!("clamp must lie in (0, 0.5), got {clamp}")));
    }
    v.iter()
        .map(|&x| if x.is_finite() { Ok(normal_cdf(x).clamp(clamp, 1.0 - clamp)) } else { Err(Error::NonFinite) })
        .collect()
}

/// `C(Qᵀt)` for a single point.
pub fn transform_point(t: &[f64], q: &StiefelPoint, clamp: f64) -> Result<Vec<f64>> {
    if t.len() != q.d() {
        return Err(Error::DimensionMismatch { expected: q.d(), got: t.len() });
    }
    let m = q.matrix();
    let projected: Vec<f64> = (0..q.k()).map(|j| m.column(j).iter().zip(t).map(|(a, b)| a * b).sum()).collect();
    gaussian_cdf(&projected, clamp)
}

/// Replaces every point by `C(Qᵀt_i)`; targets are copied unchanged.
pub fn transform_dataset(data: &Dataset, q: &StiefelPoint, clamp: f64) -> Result<Dataset> {
    let mut points = Vec::with_capacity(data.len() * q.k());
    for t in data.points() {
        points.extend(transform_point(t, q, clamp)?);
    }
    Dataset::new(q.k(), points, data.targets().to_vec())
}

/// Per-coordinate z-score statistics from a training set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardization {
    /// Coordinates with zero spread keep unit scale.
    pub fn fit(data: &Dataset) -> Self {
        let n = data.len() as f64;
        let d = data.dim();
        let mut mean = vec![0.0; d];
        for t in data.points() {
            for (m, x) in mean.iter_mut().zip(t) {
                *m += x / n;
            }
        }
        let mut var = vec![0.0; d];
        for t in data.points() {
            for ((v, x), m) in var.iter_mut().zip(t).zip(&mean) {
                *v += (x - m) * (x - m) / n;
            }
        }
        let std = var.into_iter().map(|v| if v > 0.0 { v.sqrt() } else { 1.0 }).collect();
        Self { mean, std }
    }

    pub fn apply_point(&self, t: &[f64]) -> Vec<f64> {
        t.iter().zip(&self.mean).zip(&self.std).map(|((x, m), s)| (x - m) / s).collect()
    }

    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        if data.dim() != self.mean.len() {
            return Err(Error::DimensionMismatch { expected: self.mean.len(), got: data.dim() });
        }
        let points = data.points().flat_map(|t| self.apply_point(t)).collect();
        Dataset::new(data.dim(), points, data.targets().to_vec())
    }
}

/// `sqrt(Σ (f_i − x_i)² / Σ x_i²)`.
pub fn nrmse(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(Error::DimensionMismatch { expected: targets.len(), got: predictions.len() });
    }
    let den: f64 = targets.iter().map(|x| x * x).sum();
    if den == 0.0 {
        return Err(Error::ZeroTargets);
    }
    let num: f64 = predictions.iter().zip(targets).map(|(f, x)| (f - x) * (f - x)).sum();
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.96) - 0.975_002_104_851_779_6).abs() < 1e-15);
        for x in [0.1, 0.7, 2.5, 5.0] {
            assert!((normal_cdf(-x) - (1.0 - normal_cdf(x))).abs() < 1e-12);
        }
        assert_eq!(gaussian_cdf(&[-40.0, 40.0], 1e-12).unwrap(), vec![1e-12, 1.0 - 1e-12]);
        assert!(matches!(gaussian_cdf(&[f64::NAN], 1e-12), Err(Error::NonFinite)));
    }

    #[test]
    fn transform_examples() {
        let q = StiefelPoint::identity(3, 3).unwrap();
        let d = Dataset::new(3, vec![0.0; 3], vec![7.25]).unwrap();
        let z = transform_dataset(&d, &q, 1e-12).unwrap();
        assert_eq!(z.point(0), &[0.5, 0.5, 0.5]);
        assert_eq!(z.targets(), d.targets());

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = StiefelPoint::new(DMatrix::from_column_slice(2, 1, &[s, s])).unwrap();
        let p = transform_point(&[1.0, 1.0], &q, 1e-12).unwrap();
        assert!((p[0] - normal_cdf(std::f64::consts::SQRT_2)).abs() < 1e-15);
        assert!((p[0] - 0.9214).abs() < 1e-4);
        assert!(transform_point(&[1.0], &q, 1e-12).is_err());
    }

    #[test]
    fn nrmse_examples() {
        let x = [1.0, -2.0, 0.5];
        assert_eq!(nrmse(&x, &x).unwrap(), 0.0);
        assert_eq!(nrmse(&[0.0; 3], &x).unwrap(), 1.0);
        assert!((nrmse(&[1.1; 4], &[1.0; 4]).unwrap() - 0.1).abs() < 1e-12);
        assert!(matches!(nrmse(&[1.0], &[0.0]), Err(Error::ZeroTargets)));
    }

    #[test]
    fn standardization_centers_and_scales() {
        let d = Dataset::new(2, vec![1.0, 5.0, 3.0, 5.0, 5.0, 5.0], vec![0.0; 3]).unwrap();
        let s = Standardization::fit(&d);
        assert_eq!(s.mean, vec![3.0, 5.0]);
        assert_eq!(s.std[1], 1.0);
        let z = s.apply(&d).unwrap();
        let col0: f64 = z.points().map(|t| t[0] * t[0]).sum::<f64>() / 3.0;
        assert!((col0 - 1.0).abs() < 1e-12);
    }
}
