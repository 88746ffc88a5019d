//! Composition `y ↦ p(Qy)` of a polynomial with a linear map, expanded back
//! into the total-degree monomial basis of the `k` new variables.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::multi_index::{enumerate_total_degree, MultiIndex};
use super::polynomial::Polynomial;
use crate::error::{Error, Result};

/// Dense coefficient layout for polynomials of total degree `≤ m` in `n`
/// variables, with a precomputed product table.
#[derive(Clone, Debug)]
pub(crate) struct DenseSpace {
    pub n_vars: usize,
    pub degree: u32,
    pub basis: Vec<MultiIndex>,
    degrees: Vec<u32>,
    // product[a][b] is the index of basis[a]·basis[b] when its degree is ≤ m
    product: Vec<Vec<(usize, usize)>>,
    unit: Vec<usize>,
}

impl DenseSpace {
    pub fn new(n_vars: usize, degree: u32) -> Self {
        let basis = enumerate_total_degree(n_vars, degree);
        let lookup: HashMap<MultiIndex, usize> = basis.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let degrees: Vec<u32> = basis.iter().map(MultiIndex::degree).collect();
        let product = basis
            .iter()
            .map(|a| {
                basis
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| a.degree() + b.degree() <= degree)
                    .map(|(j, b)| (j, lookup[&a.add(b)]))
                    .collect()
            })
            .collect();
        let unit = (0..n_vars)
            .map(|j| if degree >= 1 { lookup[&MultiIndex::unit(n_vars, j)] } else { usize::MAX })
            .collect();
        Self { n_vars, degree, basis, degrees, product, unit }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    /// `out = a · b`, truncating nothing: callers keep the degree sum ≤ m.
    fn mul_into(&self, a: &[f64], a_deg: u32, b: &[f64], b_deg: u32, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, &ca) in a.iter().enumerate() {
            if ca == 0.0 || self.degrees[i] > a_deg {
                continue;
            }
            for &(j, ij) in &self.product[i] {
                if self.degrees[j] > b_deg {
                    continue;
                }
                let cb = b[j];
                if cb != 0.0 {
                    out[ij] += ca * cb;
                }
            }
        }
    }

    pub fn to_polynomial(&self, coefs: &[f64]) -> Polynomial {
        let mut p = Polynomial::zero(self.n_vars);
        for (a, &c) in self.basis.iter().zip(coefs) {
            p.add_term(a.clone(), c);
        }
        p
    }
}

/// Composes a `d`-variate polynomial with a `d × k` matrix.
///
/// Prepared once per `(p, k)` so repeated evaluations for different matrices
/// only redo the expansion, which is what the optimizer needs.
#[derive(Clone, Debug)]
pub(crate) struct Composer {
    pub space: DenseSpace,
    terms: Vec<(Vec<u32>, f64)>,
    max_power: Vec<u32>,
}

impl Composer {
    pub fn new(p: &Polynomial, k: usize) -> Self {
        let degree = p.degree();
        let terms: Vec<(Vec<u32>, f64)> = p.terms().map(|(a, c)| (a.exponents().to_vec(), c)).collect();
        let mut max_power = vec![0u32; p.n_vars()];
        for (e, _) in &terms {
            for (m, &q) in max_power.iter_mut().zip(e) {
                *m = (*m).max(q);
            }
        }
        Self { space: DenseSpace::new(k, degree), terms, max_power }
    }

    /// Dense coefficients of `y ↦ p(Qy)` in `self.space`.
    pub fn compose_dense(&self, q: &DMatrix<f64>) -> Vec<f64> {
        let space = &self.space;
        let n = space.len();
        let d = self.max_power.len();
        debug_assert_eq!(q.nrows(), d);
        debug_assert_eq!(q.ncols(), space.n_vars);

        // powers[i][e] = (Σ_j Q_ij y_j)^e
        let mut powers: Vec<Vec<Vec<f64>>> = Vec::with_capacity(d);
        for i in 0..d {
            let mut row = Vec::with_capacity(self.max_power[i] as usize + 1);
            let mut one = vec![0.0; n];
            one[0] = 1.0;
            row.push(one);
            if self.max_power[i] >= 1 {
                let mut lin = vec![0.0; n];
                for j in 0..space.n_vars {
                    lin[space.unit[j]] = q[(i, j)];
                }
                for e in 1..=self.max_power[i] {
                    if e == 1 {
                        row.push(lin.clone());
                    } else {
                        let mut next = vec![0.0; n];
                        space.mul_into(&row[e as usize - 1], e - 1, &lin, 1, &mut next);
                        row.push(next);
                    }
                }
            }
            powers.push(row);
        }

        let mut out = vec![0.0; n];
        let mut acc = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        for (e, c) in &self.terms {
            acc.iter_mut().for_each(|v| *v = 0.0);
            acc[0] = 1.0;
            let mut acc_deg = 0;
            for (i, &q) in e.iter().enumerate() {
                if q == 0 {
                    continue;
                }
                space.mul_into(&acc, acc_deg, &powers[i][q as usize], q, &mut tmp);
                std::mem::swap(&mut acc, &mut tmp);
                acc_deg += q;
            }
            for (o, a) in out.iter_mut().zip(&acc) {
                *o += c * a;
            }
        }
        out
    }
}

/// The polynomial `y ↦ p(Qy)` for any `d × k` matrix `Q`, in canonical form.
///
/// The result has degree at most `degree(p)`.
pub fn compose_polynomial(p: &Polynomial, q: &DMatrix<f64>) -> Result<Polynomial> {
    if q.nrows() != p.n_vars() {
        return Err(Error::DimensionMismatch { expected: p.n_vars(), got: q.nrows() });
    }
    if q.ncols() == 0 || q.ncols() > q.nrows() {
        return Err(Error::InvalidShape { d: q.nrows(), k: q.ncols() });
    }
    let composer = Composer::new(p, q.ncols());
    let dense = composer.compose_dense(q);
    Ok(composer.space.to_polynomial(&dense))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_onto_second_axis_kills_x1() {
        let p = Polynomial::variable(2, 0);
        let q = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        assert!(compose_polynomial(&p, &q).unwrap().is_zero());
    }

    #[test]
    fn identity_is_neutral() {
        let p = Polynomial::from_terms(2, [(vec![2, 0], 1.0)]).unwrap();
        let q = DMatrix::identity(2, 2);
        assert_eq!(compose_polynomial(&p, &q).unwrap(), p);
    }

    #[test]
    fn diagonal_projection_of_sum() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = Polynomial::from_terms(2, [(vec![1, 0], 1.0), (vec![0, 1], 1.0)]).unwrap();
        let q = DMatrix::from_column_slice(2, 1, &[s, s]);
        let r = compose_polynomial(&p, &q).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.coefficient(&[1]) - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rotated_product() {
        // x1 = (y1 - y2)/√2, x2 = (y1 + y2)/√2  =>  x1 x2 = (y1² - y2²)/2
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = Polynomial::from_terms(2, [(vec![1, 1], 1.0)]).unwrap();
        let q = DMatrix::from_row_slice(2, 2, &[s, -s, s, s]);
        let r = compose_polynomial(&p, &q).unwrap();
        assert!((r.coefficient(&[2, 0]) - 0.5).abs() < 1e-14);
        assert!((r.coefficient(&[0, 2]) + 0.5).abs() < 1e-14);
        assert!(r.coefficient(&[1, 1]).abs() < 1e-14);
    }

    #[test]
    fn shape_errors() {
        let p = Polynomial::variable(3, 0);
        assert!(compose_polynomial(&p, &DMatrix::identity(2, 2)).is_err());
        assert!(compose_polynomial(&p, &DMatrix::zeros(3, 4)).is_err());
    }
}
