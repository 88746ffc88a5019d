//! Exact ANOVA quantities of polynomials under the standard Gaussian measure.
//!
//! All variances are computed from moments. For a polynomial
//! `p = Σ C_α x^α` and a subset `u`, the closed-set variance is
//!
//! ```text
//! D_u(p) + f_∅² = Σ_{α,β} C_α C_β · E[x_u^(α_u+β_u)] · E[x_uᶜ^α_uᶜ] · E[x_uᶜ^β_uᶜ]
//! ```
//!
//! and the ANOVA variances follow by Möbius inversion over the subsets of `u`.

use std::collections::HashMap;

use super::moments::MomentTable;
use super::polynomial::Polynomial;
use super::subset::Subset;
use crate::error::{Error, Result};

/// Tolerance below which negative variances are treated as round-off.
pub const VARIANCE_CLAMP: f64 = 1e-9;

/// Polynomial terms flattened into contiguous arrays for the double sums.
pub(crate) struct FlatPoly {
    pub n_vars: usize,
    pub exps: Vec<u32>,
    pub coefs: Vec<f64>,
    pub table: MomentTable,
}

impl FlatPoly {
    pub fn new(p: &Polynomial) -> Self {
        Self::from_dense(p.n_vars(), p.terms().map(|(a, c)| (a.exponents(), c)), 2 * p.degree())
    }

    pub fn from_dense<'a, I>(n_vars: usize, terms: I, max_exponent: u32) -> Self
    where
        I: IntoIterator<Item = (&'a [u32], f64)>,
    {
        let mut exps = Vec::new();
        let mut coefs = Vec::new();
        for (e, c) in terms {
            if c != 0.0 {
                exps.extend_from_slice(e);
                coefs.push(c);
            }
        }
        Self { n_vars, exps, coefs, table: MomentTable::new(max_exponent) }
    }

    #[inline]
    fn term(&self, t: usize) -> &[u32] {
        &self.exps[t * self.n_vars..(t + 1) * self.n_vars]
    }

    pub fn mean(&self) -> f64 {
        (0..self.coefs.len())
            .map(|t| self.coefs[t] * self.term(t).iter().map(|&q| self.table.get(q)).product::<f64>())
            .sum()
    }

    /// `D_u + f_∅²`, the integral of the squared projection onto `u`.
    pub fn projected_square(&self, u: Subset) -> f64 {
        let inside: Vec<usize> = u.members().filter(|&j| j < self.n_vars).collect();
        let n_terms = self.coefs.len();
        // weight of each term after integrating out the coordinates outside u
        let mut live = Vec::with_capacity(n_terms);
        for t in 0..n_terms {
            let e = self.term(t);
            let outer: f64 = (0..self.n_vars)
                .filter(|j| !u.contains(*j))
                .map(|j| self.table.get(e[j]))
                .product();
            if outer != 0.0 {
                live.push((t, self.coefs[t] * outer));
            }
        }
        let mut acc = 0.0;
        for (a, &(s, ws)) in live.iter().enumerate() {
            let es = self.term(s);
            let inner = |et: &[u32]| -> f64 {
                let mut v = 1.0;
                for &j in &inside {
                    v *= self.table.get(es[j] + et[j]);
                    if v == 0.0 {
                        break;
                    }
                }
                v
            };
            acc += ws * ws * inner(es);
            for &(t, wt) in &live[a + 1..] {
                acc += 2.0 * ws * wt * inner(self.term(t));
            }
        }
        acc
    }

    pub fn d_u(&self, u: Subset, mean: f64) -> f64 {
        if u.is_empty() {
            return 0.0;
        }
        self.projected_square(u) - mean * mean
    }
}

fn check_subset(p: &Polynomial, u: Subset) -> Result<()> {
    match u.max() {
        Some(j) if j >= p.n_vars() => Err(Error::IndexOutOfRange { index: j, n_vars: p.n_vars() }),
        _ => Ok(()),
    }
}

fn clamp(v: f64, scale: f64) -> f64 {
    if v < 0.0 && v > -VARIANCE_CLAMP * scale.max(1.0) {
        0.0
    } else {
        v
    }
}

/// `f_∅ = E[p]`.
pub fn mean_value(p: &Polynomial) -> f64 {
    FlatPoly::new(p).mean()
}

/// Closed-set variance `D_u(p) = Σ_{v⊆u} σ²_v(p)`, with `D_∅ = 0`.
pub fn d_u(p: &Polynomial, u: Subset) -> Result<f64> {
    check_subset(p, u)?;
    let flat = FlatPoly::new(p);
    Ok(flat.d_u(u, flat.mean()))
}

/// `σ²_μ(p) = E[p²] − f_∅²`.
pub fn total_variance(p: &Polynomial) -> f64 {
    let flat = FlatPoly::new(p);
    let mean = flat.mean();
    let second = flat.projected_square(Subset::first(p.n_vars()));
    clamp(second - mean * mean, second)
}

/// ANOVA variances `σ²_v` for every `v ⊆ u`, computed once from the closed
/// variances by subset recursion. `σ²_∅ = 0`.
pub fn anova_variances(p: &Polynomial, u: Subset) -> Result<HashMap<Subset, f64>> {
    check_subset(p, u)?;
    let flat = FlatPoly::new(p);
    let mean = flat.mean();
    let scale = flat.projected_square(Subset::first(p.n_vars()));
    Ok(anova_variances_flat(&flat, u, mean, scale))
}

pub(crate) fn anova_variances_flat(flat: &FlatPoly, u: Subset, mean: f64, scale: f64) -> HashMap<Subset, f64> {
    let subsets = u.subsets();
    let mut raw: HashMap<Subset, f64> = HashMap::with_capacity(subsets.len());
    for &v in &subsets {
        if v.is_empty() {
            raw.insert(v, 0.0);
            continue;
        }
        let mut s = flat.d_u(v, mean);
        for w in v.subsets() {
            if w != v {
                s -= raw[&w];
            }
        }
        raw.insert(v, s);
    }
    raw.into_iter().map(|(v, s)| (v, clamp(s, scale))).collect()
}

/// `σ²_{u,μ}(p)`, the variance of the ANOVA term `f_u`.
pub fn sigma_sq_u(p: &Polynomial, u: Subset) -> Result<f64> {
    Ok(anova_variances(p, u)?[&u])
}

fn nondegenerate_variance(p: &Polynomial) -> Result<f64> {
    let flat = FlatPoly::new(p);
    let mean = flat.mean();
    let second = flat.projected_square(Subset::first(p.n_vars()));
    let var = second - mean * mean;
    if var <= 1e-12 * second.max(f64::MIN_POSITIVE) || var <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok(var)
}

/// Sensitivity coefficient `s_u = σ²_u / σ²`.
pub fn sensitivity(p: &Polynomial, u: Subset) -> Result<f64> {
    let var = nondegenerate_variance(p)?;
    Ok(sigma_sq_u(p, u)? / var)
}

/// Weights `ν_u = 1 − exp(−max u)` for non-empty `u ⊆ {1, …, k}` and `ν_u = 1`
/// for all other subsets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightScheme {
    pub k: usize,
}

impl WeightScheme {
    pub fn new(k: usize) -> Self {
        Self { k }
    }

    pub fn weight(&self, u: Subset) -> f64 {
        match u.max_one_based() {
            Some(m) if m <= self.k => 1.0 - (-(m as f64)).exp(),
            _ => 1.0,
        }
    }

    /// `exp(−max u)` on non-empty subsets of the first `k` variables, else 0.
    pub fn complement_weight(&self, u: Subset) -> f64 {
        match u.max_one_based() {
            Some(m) if m <= self.k => (-(m as f64)).exp(),
            _ => 0.0,
        }
    }
}

/// Generalized mean dimension `d_ν(p) = Σ_{u≠∅} ν_u s_u(p)`.
///
/// Since the sensitivities sum to one, only subsets of the first `k`
/// variables need to be visited: `d_ν = 1 − Σ_{u⊆[k]} exp(−max u) s_u`.
pub fn mean_dimension(p: &Polynomial, w: WeightScheme) -> Result<f64> {
    if w.k == 0 || w.k > p.n_vars() {
        return Err(Error::Config(format!("weight truncation k={} outside 1..={}", w.k, p.n_vars())));
    }
    let var = nondegenerate_variance(p)?;
    let sig = anova_variances(p, Subset::first(w.k))?;
    let low: f64 = sig.iter().map(|(&u, &s)| w.complement_weight(u) * s).sum();
    Ok(1.0 - low / var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn x1_plus_x1x2() -> Polynomial {
        Polynomial::from_terms(2, [(vec![1, 0], 1.0), (vec![1, 1], 1.0)]).unwrap()
    }

    #[test]
    fn mean_values() {
        assert_eq!(mean_value(&Polynomial::constant(3, 7.0)), 7.0);
        assert_eq!(mean_value(&Polynomial::variable(2, 0)), 0.0);
        let p = Polynomial::from_terms(2, [(vec![2, 0], 1.0), (vec![1, 1], 1.0)]).unwrap();
        assert_eq!(mean_value(&p), 1.0);
    }

    #[test]
    fn closed_variances() {
        let c = Polynomial::constant(2, 3.0);
        assert_eq!(d_u(&c, Subset::from_indices(&[0])).unwrap(), 0.0);
        let x1x2 = Polynomial::from_terms(2, [(vec![1, 1], 1.0)]).unwrap();
        assert_eq!(d_u(&x1x2, Subset::from_indices(&[0])).unwrap(), 0.0);
        let p = x1_plus_x1x2();
        assert_relative_eq!(d_u(&p, Subset::from_indices(&[0])).unwrap(), 1.0);
        assert_relative_eq!(d_u(&p, Subset::from_indices(&[0, 1])).unwrap(), 2.0);
        assert_eq!(d_u(&p, Subset::EMPTY).unwrap(), 0.0);
        assert!(matches!(
            d_u(&p, Subset::from_indices(&[2])),
            Err(Error::IndexOutOfRange { index: 2, n_vars: 2 })
        ));
    }

    #[test]
    fn anova_terms() {
        let p = x1_plus_x1x2();
        let s = anova_variances(&p, Subset::first(2)).unwrap();
        assert_relative_eq!(s[&Subset::from_indices(&[0])], 1.0);
        assert_eq!(s[&Subset::from_indices(&[1])], 0.0);
        assert_relative_eq!(s[&Subset::from_indices(&[0, 1])], 1.0);
        assert_eq!(s[&Subset::EMPTY], 0.0);

        let x1x2 = Polynomial::from_terms(2, [(vec![1, 1], 1.0)]).unwrap();
        assert_relative_eq!(sigma_sq_u(&x1x2, Subset::first(2)).unwrap(), 1.0);
        assert_eq!(sigma_sq_u(&x1x2, Subset::from_indices(&[1])).unwrap(), 0.0);

        let c = Polynomial::constant(3, -1.0);
        assert!(anova_variances(&c, Subset::first(3)).unwrap().values().all(|&v| v == 0.0));
    }

    #[test]
    fn variances_and_sensitivities() {
        assert_eq!(total_variance(&Polynomial::variable(1, 0)), 1.0);
        let p = Polynomial::from_terms(1, [(vec![2], 2.0)]).unwrap();
        assert_relative_eq!(total_variance(&p), 8.0);
        assert_eq!(total_variance(&Polynomial::constant(2, 4.0)), 0.0);

        let p = x1_plus_x1x2();
        assert_relative_eq!(sensitivity(&p, Subset::from_indices(&[0])).unwrap(), 0.5);
        assert_relative_eq!(sensitivity(&p, Subset::first(2)).unwrap(), 0.5);
        assert_relative_eq!(sensitivity(&Polynomial::variable(1, 0), Subset::first(1)).unwrap(), 1.0);
        assert!(matches!(sensitivity(&Polynomial::constant(2, 1.0), Subset::first(1)), Err(Error::DegenerateVariance)));
    }

    #[test]
    fn mean_dimension_examples() {
        let e1 = (-1.0f64).exp();
        let e2 = (-2.0f64).exp();
        let md = mean_dimension(&Polynomial::variable(1, 0), WeightScheme::new(1)).unwrap();
        assert_relative_eq!(md, 1.0 - e1, epsilon = 1e-12);
        let md = mean_dimension(&Polynomial::variable(3, 2), WeightScheme::new(2)).unwrap();
        assert_relative_eq!(md, 1.0, epsilon = 1e-12);
        let md = mean_dimension(&x1_plus_x1x2(), WeightScheme::new(2)).unwrap();
        assert_relative_eq!(md, 0.5 * (1.0 - e1) + 0.5 * (1.0 - e2), epsilon = 1e-12);
        assert_relative_eq!(md, 0.748_393_6, epsilon = 1e-6);
    }

    #[test]
    fn weights() {
        let w = WeightScheme::new(2);
        assert_relative_eq!(w.weight(Subset::from_indices(&[0, 1])), 1.0 - (-2.0f64).exp());
        assert_eq!(w.weight(Subset::from_indices(&[2])), 1.0);
        assert_eq!(w.weight(Subset::from_indices(&[0, 2])), 1.0);
    }
}
