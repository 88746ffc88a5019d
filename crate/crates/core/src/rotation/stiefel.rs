//! Points and tangent directions on the Stiefel manifold `V_k(R^d)`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Tolerance on `‖QᵀQ − I‖_F` accepted by [`StiefelPoint::new`].
pub const FRAME_TOLERANCE: f64 = 1e-10;

/// A `d × k` matrix with orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct StiefelPoint(DMatrix<f64>);

/// A `d × k` search direction attached to a [`StiefelPoint`].
///
/// Tangency is not enforced; [`parallel_transport`] re-projects.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentDirection(DMatrix<f64>);

impl StiefelPoint {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.ncols() == 0 || m.ncols() > m.nrows() {
            return Err(Error::InvalidShape { d: m.nrows(), k: m.ncols() });
        }
        let p = Self(m);
        let defect = p.orthonormality_defect();
        if defect > FRAME_TOLERANCE {
            return Err(Error::InvalidFrame { defect });
        }
        Ok(p)
    }

    /// Wraps a matrix without checking orthonormality.
    pub fn new_unchecked(m: DMatrix<f64>) -> Self {
        Self(m)
    }

    /// The first `k` columns of the `d × d` identity.
    pub fn identity(d: usize, k: usize) -> Result<Self> {
        if k == 0 || k > d {
            return Err(Error::InvalidShape { d, k });
        }
        Ok(Self(DMatrix::identity(d, k)))
    }

    /// Orthonormalized `d × k` matrix of i.i.d. standard normal entries.
    pub fn random(d: usize, k: usize, seed: u64) -> Result<Self> {
        if k == 0 || k > d {
            return Err(Error::InvalidShape { d, k });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(d, k, |_, _| StandardNormal.sample(&mut rng));
        orthonormalize(m).map(Self).map_err(|_| Error::InvalidShape { d, k })
    }

    pub fn d(&self) -> usize {
        self.0.nrows()
    }

    pub fn k(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.0.column(j).iter().copied().collect()
    }

    /// `‖QᵀQ − I‖_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.0.transpose() * &self.0;
        (g - DMatrix::<f64>::identity(self.k(), self.k())).norm()
    }

    /// Projection of an ambient matrix onto the tangent space at `self`:
    /// `Z − Q·sym(QᵀZ)`.
    pub fn project_tangent(&self, z: &DMatrix<f64>) -> TangentDirection {
        let a = self.0.transpose() * z;
        let sym = (&a + a.transpose()) * 0.5;
        TangentDirection(z - &self.0 * sym)
    }
}

impl TangentDirection {
    pub fn new(m: DMatrix<f64>) -> Self {
        Self(m)
    }

    pub fn zeros(d: usize, k: usize) -> Self {
        Self(DMatrix::zeros(d, k))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Frobenius inner product.
    pub fn dot(&self, other: &TangentDirection) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scaled_add(&self, beta: f64, other: &TangentDirection) -> TangentDirection {
        TangentDirection(&self.0 + &other.0 * beta)
    }

    pub fn neg(&self) -> TangentDirection {
        TangentDirection(-&self.0)
    }
}

// Thin QR with diag(R) > 0; fails when a diagonal entry of R is negligible.
fn orthonormalize(m: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let qr = m.qr();
    let r = qr.r();
    let mut q = qr.q();
    let scale = (0..r.ncols()).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    for j in 0..r.ncols() {
        let rjj = r[(j, j)];
        if !rjj.is_finite() || rjj.abs() <= 1e-12 * scale || scale == 0.0 {
            return Err(Error::RankDeficientRetraction);
        }
        if rjj < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(q)
}

/// QR retraction: the Q factor of `Q + δM` with positive diagonal in R.
pub fn retract(q: &StiefelPoint, delta: f64, m: &TangentDirection) -> Result<StiefelPoint> {
    if q.0.shape() != m.0.shape() {
        return Err(Error::DimensionMismatch { expected: q.d() * q.k(), got: m.0.len() });
    }
    orthonormalize(&q.0 + &m.0 * delta).map(StiefelPoint)
}

/// Differential of the QR retraction at `δ = 0` in direction `M`:
/// `(I − QQᵀ)M + QΩ`, where `Ω` is the skew matrix built from the strictly
/// lower triangle of `QᵀM`. Equals `M` for tangent `M`.
pub fn retraction_differential(q: &StiefelPoint, m: &TangentDirection) -> DMatrix<f64> {
    let a = q.0.transpose() * &m.0;
    let k = a.nrows();
    let omega = DMatrix::from_fn(k, k, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => a[(i, j)],
        std::cmp::Ordering::Less => -a[(j, i)],
        std::cmp::Ordering::Equal => 0.0,
    });
    &m.0 - &q.0 * &a + &q.0 * omega
}

/// Transports a direction to the tangent space at `q_bar`:
/// `(I − Q̄Q̄ᵀ)M + ½Q̄(Q̄ᵀM − MᵀQ̄)`.
pub fn parallel_transport(m: &TangentDirection, q_bar: &StiefelPoint) -> TangentDirection {
    let q = &q_bar.0;
    let a = q.transpose() * &m.0;
    let normal_free = &m.0 - q * &a;
    let skew = (&a - a.transpose()) * 0.5;
    TangentDirection(normal_free + q * skew)
}
