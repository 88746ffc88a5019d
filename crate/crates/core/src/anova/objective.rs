use nalgebra::DMatrix;

use super::compose::Composer;
use super::polynomial::Polynomial;
use super::subset::Subset;
use super::variance::{anova_variances, FlatPoly, WeightScheme};
use crate::error::{Error, Result};
use crate::rotation::StiefelPoint;

/// The rotation objective `M̂_p(Q)`: the variance of `p ∘ Q` that lands in
/// ANOVA terms of the leading coordinates, weighted by `exp(−max u)`.
///
/// Evaluated through the telescoping form
/// `Σ_{i=1..k} exp(−i)·(D_[i] − D_[i−1])`, which needs only `k` closed
/// variances instead of all `2^k` ANOVA terms.
#[derive(Clone, Debug)]
pub struct AnovaObjective {
    composer: Composer,
    n_vars: usize,
    k: usize,
}

impl AnovaObjective {
    pub fn new(p: &Polynomial, k: usize) -> Result<Self> {
        if k == 0 || k > p.n_vars() {
            return Err(Error::InvalidShape { d: p.n_vars(), k });
        }
        Ok(Self { composer: Composer::new(p, k), n_vars: p.n_vars(), k })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Evaluates the objective at any `d × k` matrix, orthonormal or not.
    pub fn value_unchecked(&self, q: &DMatrix<f64>) -> f64 {
        let dense = self.composer.compose_dense(q);
        let space = &self.composer.space;
        let flat = FlatPoly::from_dense(
            self.k,
            space.basis.iter().map(|a| a.exponents()).zip(dense.iter().copied()),
            2 * space.degree,
        );
        let mean = flat.mean();
        let mut prev = 0.0;
        let mut total = 0.0;
        for i in 1..=self.k {
            let d = flat.d_u(Subset::first(i), mean);
            total += (-(i as f64)).exp() * (d - prev);
            prev = d;
        }
        total
    }

    pub fn value(&self, q: &StiefelPoint) -> Result<f64> {
        if q.d() != self.n_vars || q.k() != self.k {
            return Err(Error::DimensionMismatch { expected: self.n_vars * self.k, got: q.d() * q.k() });
        }
        Ok(self.value_unchecked(q.matrix()))
    }
}

/// `M̂_p(Q)` for an orthonormal `d × k` frame `Q`.
pub fn objective(p: &Polynomial, q: &StiefelPoint, k: usize) -> Result<f64> {
    if q.k() != k {
        return Err(Error::DimensionMismatch { expected: k, got: q.k() });
    }
    if q.d() != p.n_vars() {
        return Err(Error::DimensionMismatch { expected: p.n_vars(), got: q.d() });
    }
    let defect = q.orthonormality_defect();
    if defect > 1e-8 {
        return Err(Error::InvalidFrame { defect });
    }
    AnovaObjective::new(p, k)?.value(q)
}

/// `Σ_{∅≠u⊆[k]} exp(−max u)·σ²_u(r)` evaluated term by term over all
/// subsets of the first `k` variables of `r`.
pub fn weighted_anova_sum(r: &Polynomial, k: usize) -> Result<f64> {
    let w = WeightScheme::new(k);
    let sig = anova_variances(r, Subset::first(k))?;
    Ok(sig.iter().map(|(&u, &s)| w.complement_weight(u) * s).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anova::compose_polynomial;

    #[test]
    fn constant_has_zero_objective() {
        let p = Polynomial::constant(3, 2.0);
        let q = StiefelPoint::random(3, 2, 1).unwrap();
        assert_eq!(objective(&p, &q, 2).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_ridge() {
        let x = Polynomial::variable(2, 0);
        let y = Polynomial::variable(2, 1);
        let p = (&x + &y).powi(2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = StiefelPoint::new(DMatrix::from_column_slice(2, 1, &[s, s])).unwrap();
        let v = objective(&p, &q, 1).unwrap();
        assert!((v - 8.0 * (-1.0f64).exp()).abs() < 1e-12);
        assert!((v - 2.943_035_529_371_538).abs() < 1e-9);
    }

    #[test]
    fn telescoping_matches_subset_sum() {
        let p = Polynomial::from_terms(
            3,
            [
                (vec![1, 0, 0], 0.3),
                (vec![0, 2, 1], -1.1),
                (vec![1, 1, 0], 0.7),
                (vec![0, 0, 3], 0.4),
                (vec![2, 0, 0], 1.3),
            ],
        )
        .unwrap();
        let q = StiefelPoint::random(3, 2, 9).unwrap();
        let v = objective(&p, &q, 2).unwrap();
        let r = compose_polynomial(&p, q.matrix()).unwrap();
        let direct = weighted_anova_sum(&r, 2).unwrap();
        assert!((v - direct).abs() <= 1e-10 * direct.abs());
    }

    #[test]
    fn rejects_non_orthonormal_frames() {
        let p = Polynomial::variable(2, 0);
        let q = StiefelPoint::new_unchecked(DMatrix::from_column_slice(2, 1, &[1.0, 1.0]));
        assert!(matches!(objective(&p, &q, 1), Err(Error::InvalidFrame { .. })));
    }
}
