use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::multi_index::MultiIndex;
use crate::error::{Error, Result};

/// Sparse multivariate polynomial `Σ C_α x^α` in canonical form.
///
/// Canonical means every key has length `n_vars`, duplicates are merged and
/// no coefficient is exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    n_vars: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl Polynomial {
    pub fn zero(n_vars: usize) -> Self {
        Self { n_vars, terms: BTreeMap::new() }
    }

    pub fn constant(n_vars: usize, c: f64) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(MultiIndex::zero(n_vars), c);
        p
    }

    /// The coordinate function `x_j` (0-based).
    pub fn variable(n_vars: usize, j: usize) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(MultiIndex::unit(n_vars, j), 1.0);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs.
    pub fn from_terms<I, E>(n_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (E, f64)>,
        E: Into<MultiIndex>,
    {
        let mut p = Self::zero(n_vars);
        for (e, c) in terms {
            let e = e.into();
            if e.n_vars() != n_vars {
                return Err(Error::DimensionMismatch { expected: n_vars, got: e.n_vars() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Adds `c · x^α`, merging with an existing term and dropping exact zeros.
    pub fn add_term(&mut self, alpha: MultiIndex, c: f64) {
        assert_eq!(alpha.n_vars(), self.n_vars, "multi-index length must equal n_vars");
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(alpha);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Maximum total degree over stored terms; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> f64 {
        self.terms.get(&MultiIndex::new(exponents.to_vec())).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n_vars);
        self.terms.iter().map(|(a, c)| c * a.eval(x)).sum()
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        let mut out = Polynomial::zero(self.n_vars);
        for (a, c) in self.terms() {
            out.add_term(a.clone(), c * s);
        }
        out
    }

    pub fn powi(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::constant(self.n_vars, 1.0);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Largest absolute coefficient difference to `other`.
    pub fn max_coefficient_diff(&self, other: &Polynomial) -> f64 {
        let mut diff: f64 = 0.0;
        for (a, c) in self.terms() {
            diff = diff.max((c - other.terms.get(a).copied().unwrap_or(0.0)).abs());
        }
        for (a, c) in other.terms() {
            if !self.terms.contains_key(a) {
                diff = diff.max(c.abs());
            }
        }
        diff
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n_vars, rhs.n_vars);
        let mut out = self.clone();
        for (a, c) in rhs.terms() {
            out.add_term(a.clone(), c);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n_vars, rhs.n_vars);
        let mut out = Polynomial::zero(self.n_vars);
        for (a, ca) in self.terms() {
            for (b, cb) in rhs.terms() {
                out.add_term(a.add(b), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_drops_zeros_and_merges() {
        let p = Polynomial::from_terms(2, [(vec![1, 0], 2.0), (vec![1, 0], -2.0), (vec![0, 1], 0.0)]).unwrap();
        assert!(p.is_zero());
        let p = Polynomial::from_terms(2, [(vec![1, 1], 1.5), (vec![1, 1], 1.0)]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coefficient(&[1, 1]), 2.5);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn key_length_checked() {
        assert!(Polynomial::from_terms(2, [(vec![1, 0, 0], 1.0)]).is_err());
    }

    #[test]
    fn arithmetic() {
        let x = Polynomial::variable(2, 0);
        let y = Polynomial::variable(2, 1);
        let p = (&x + &y).powi(2);
        assert_eq!(p.coefficient(&[2, 0]), 1.0);
        assert_eq!(p.coefficient(&[1, 1]), 2.0);
        assert_eq!(p.coefficient(&[0, 2]), 1.0);
        assert_eq!(p.eval(&[1.5, -0.5]), 1.0);
        assert!((&p - &p).is_zero());
    }
}
