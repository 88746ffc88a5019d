//! Least-squares fit of the total-degree polynomial surrogate.
//!
//! The coefficients minimize `‖Aw − x‖₂` for the Vandermonde matrix `A` of
//! the monomials of total degree `≤ m`, solved by Householder QR followed by
//! back substitution on `R`.

use nalgebra::{DMatrix, DVector};

use crate::anova::{enumerate_total_degree, MultiIndex, Polynomial};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Columns whose `|R_jj|` falls below this fraction of `max |R_jj|` make the
/// system rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Vandermonde matrix `A[i][j] = t_i^{α_j}` with its column multi-indices.
#[derive(Clone, Debug)]
pub struct VandermondeSystem {
    pub matrix: DMatrix<f64>,
    pub index_order: Vec<MultiIndex>,
}

pub fn build_vandermonde(data: &Dataset, degree: u32) -> VandermondeSystem {
    let index_order = enumerate_total_degree(data.dim(), degree);
    let matrix = DMatrix::from_fn(data.len(), index_order.len(), |i, j| index_order[j].eval(data.point(i)));
    VandermondeSystem { matrix, index_order }
}

/// Fits `p = Σ c_α t^α` over all `|α|₁ ≤ degree` to the data.
pub fn fit_polynomial(data: &Dataset, degree: u32) -> Result<Polynomial> {
    let sys = build_vandermonde(data, degree);
    let coefs = solve_least_squares(&sys.matrix, data.targets())?;
    let mut p = Polynomial::zero(data.dim());
    for (alpha, c) in sys.index_order.into_iter().zip(coefs.iter()) {
        p.add_term(alpha, *c);
    }
    Ok(p)
}

/// `argmin_w ‖Aw − b‖₂` via thin QR. Requires full column rank.
pub fn solve_least_squares(a: &DMatrix<f64>, b: &[f64]) -> Result<DVector<f64>> {
    let (n, k) = a.shape();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    if n < k {
        return Err(Error::RankDeficient { column: n });
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let scale = (0..k).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    if let Some(j) = (0..k).find(|&j| r[(j, j)].abs() <= RANK_TOLERANCE * scale || scale == 0.0) {
        return Err(Error::RankDeficient { column: j });
    }
    let mut rhs = DVector::from_column_slice(b);
    qr.q_tr_mul(&mut rhs);
    let top = rhs.rows(0, k).into_owned();
    r.solve_upper_triangular(&top).ok_or(Error::RankDeficient { column: 0 })
}
