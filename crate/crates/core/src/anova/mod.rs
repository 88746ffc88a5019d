//! ANOVA analytics for total-degree polynomials under `N(0, I)`.
//!
//! Everything here is exact up to floating point: moments come from the
//! double-factorial formula, and closed-set variances `D_u` from the
//! moment double sum over pairs of monomials.

mod compose;
mod moments;
mod multi_index;
mod objective;
mod polynomial;
mod subset;
mod variance;

pub use compose::compose_polynomial;
pub use moments::{gaussian_moment, moment_1d};
pub use multi_index::{enumerate_total_degree, MultiIndex};
pub use objective::{objective, weighted_anova_sum, AnovaObjective};
pub use polynomial::Polynomial;
pub use subset::Subset;
pub use variance::{
    anova_variances, d_u, mean_dimension, mean_value, sensitivity, sigma_sq_u, total_variance, WeightScheme,
    VARIANCE_CLAMP,
};
