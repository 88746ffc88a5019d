use std::cmp::Ordering;
use std::fmt;

/// Exponent vector `α` of a monomial `x^α = x₁^α₁ ⋯ xₙ^αₙ`.
///
/// Ordering is graded lexicographic: total degree first, then the larger
/// leading exponent first, so `1 < x₁ < x₂ < x₁² < x₁x₂ < x₂²`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zero(n_vars: usize) -> Self {
        Self(vec![0; n_vars])
    }

    /// The exponent vector of the single variable `x_j` (0-based).
    pub fn unit(n_vars: usize, j: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[j] = 1;
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn n_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise sum, i.e. the exponent of `x^α · x^β`.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.0.len(), other.0.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Evaluates the monomial at `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, &v)| v.powi(e as i32))
            .product()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

/// All multi-indices in `n_vars` variables with total degree `≤ max_degree`,
/// zero vector first and the rest in graded lexicographic order.
///
/// The length is `binom(n_vars + max_degree, n_vars)`.
pub fn enumerate_total_degree(n_vars: usize, max_degree: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n_vars];
    for degree in 0..=max_degree {
        fill_degree(&mut out, &mut current, 0, degree);
    }
    out
}

// Exponent vectors of exact total degree `remaining` over positions `pos..`,
// emitted with the larger leading exponent first.
fn fill_degree(out: &mut Vec<MultiIndex>, current: &mut [u32], pos: usize, remaining: u32) {
    if pos + 1 >= current.len() {
        if let Some(last) = current.len().checked_sub(1) {
            current[last] = remaining;
            out.push(MultiIndex(current.to_vec()));
            current[last] = 0;
        } else if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill_degree(out, current, pos + 1, remaining - e);
    }
    current[pos] = 0;
}
