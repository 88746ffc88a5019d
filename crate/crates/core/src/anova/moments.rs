//! Moments of the standard Gaussian product measure.

use super::multi_index::MultiIndex;

/// `E[x^q]` for a standard normal `x`: `(q-1)!!` for even `q`, 0 for odd.
///
/// Uses `(-1)!! = 1`, so `q = 0` gives 1.
pub fn moment_1d(q: u32) -> f64 {
    if q % 2 == 1 {
        return 0.0;
    }
    let mut acc = 1.0;
    let mut n = q as i64 - 1;
    while n > 1 {
        acc *= n as f64;
        n -= 2;
    }
    acc
}

/// `E[x^α]` under `N(0, I)`: the product of the one-dimensional moments.
pub fn gaussian_moment(alpha: &MultiIndex) -> f64 {
    alpha.exponents().iter().map(|&q| moment_1d(q)).product()
}

/// Lookup table of one-dimensional moments up to a fixed exponent.
#[derive(Clone, Debug)]
pub(crate) struct MomentTable(Vec<f64>);

impl MomentTable {
    pub fn new(max_exponent: u32) -> Self {
        Self((0..=max_exponent).map(moment_1d).collect())
    }

    #[inline]
    pub fn get(&self, q: u32) -> f64 {
        self.0.get(q as usize).copied().unwrap_or_else(|| moment_1d(q))
    }
}
