//! The Stiefel manifold `St(n, p) = {U : U^T U = I_p}` with the metric
//! inherited from the Frobenius inner product on `R^{n x p}`.

mod geodesic;
mod log;
mod random;

pub use geodesic::{
    generator, geodesic_curve, geodesic_derivative_coeffs, kappa1_squared, stiefel_exp, GeodesicCoeffs, GeodesicCurve,
};
pub use log::{shoot, stiefel_log, tangent_basis, LogOptions, LogOutcome, ShootResult};
pub use random::{random_point, random_point_with, random_tangent, random_tangent_with, sample_rng};

use std::sync::OnceLock;

use thiserror::Error;

use crate::matcore::{symmetric_eigen, thin_qr_avoiding, Mat, MatError};
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StiefelError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    Shape {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("columns are not orthonormal: |U^T U - I| = {defect:.3e}")]
    NotOrthonormal { defect: f64 },
    #[error("not a tangent vector: |U^T D + D^T U| = {defect:.3e}")]
    NotTangent { defect: f64 },
    #[error("matrix is rank deficient")]
    RankDeficient,
    #[error("tangent vectors live at different base points")]
    BaseMismatch,
    #[error("(A, B) is not unit speed: |A|^2 + |B|^2 = {speed_squared}")]
    NotUnitSpeed { speed_squared: f64 },
    #[error("derivative order must be at least 1, got {0}")]
    Order(usize),
    #[error("shooting did not converge after {iterations} iterations (best residual {best_residual:.3e})")]
    NoConvergence {
        iterations: usize,
        best_residual: f64,
        best: Mat,
    },
    #[error("{} tangent vectors of equal minimal norm reach the target", solutions.len())]
    Ambiguous { solutions: Vec<Mat> },
}

/// A point of `St(n, p)`: an `n x p` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelPoint {
    u: Mat,
}

impl StiefelPoint {
    pub fn new(u: Mat) -> Result<Self, StiefelError> {
        Self::with_tolerance(u, Tolerances::default().orth)
    }

    pub fn with_tolerance(u: Mat, orth: f64) -> Result<Self, StiefelError> {
        if u.rows() < u.cols() {
            return Err(MatError::TooFewRows {
                rows: u.rows(),
                cols: u.cols(),
            }
            .into());
        }
        let defect = u.orthonormality_defect();
        if defect > orth {
            return Err(StiefelError::NotOrthonormal { defect });
        }
        Ok(Self { u })
    }

    /// `[I_p; 0]`
    pub fn standard(n: usize, p: usize) -> Self {
        assert!(n >= p && p >= 1, "St(n, p) needs n >= p >= 1");
        Self { u: Mat::eye_rect(n, p) }
    }

    pub(crate) fn from_unchecked(u: Mat) -> Self {
        Self { u }
    }

    pub fn as_mat(&self) -> &Mat {
        &self.u
    }

    pub fn into_mat(self) -> Mat {
        self.u
    }

    pub fn n(&self) -> usize {
        self.u.rows()
    }

    pub fn p(&self) -> usize {
        self.u.cols()
    }

    /// Orthonormal basis of the orthogonal complement of `span(U)`, as an
    /// `n x (n - p)` matrix.
    pub fn complement(&self) -> Mat {
        let (n, p) = self.u.shape();
        if n == p {
            return Mat::zeros(n, 0);
        }
        let proj = &Mat::identity(n) - &(&self.u * &self.u.transpose());
        let eig = symmetric_eigen(&proj).expect("projector is symmetric and square");
        // eigenvalues are 0 (multiplicity p) then 1 (multiplicity n - p)
        eig.vectors.block(0, p, n, n - p)
    }
}

/// Canonical decomposition `D = U A + Q B` of a tangent vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentSplit {
    /// `A = U^T D`, skew `p x p`.
    pub a: Mat,
    /// `n x p`, orthonormal columns.
    pub q: Mat,
    /// `p x p` with `Q B = (I - U U^T) D`.
    pub b: Mat,
}

/// A tangent vector at a base point, with its split computed on first use.
#[derive(Debug, Clone)]
pub struct TangentVector {
    base: StiefelPoint,
    delta: Mat,
    split: OnceLock<TangentSplit>,
}

impl TangentVector {
    /// Validates `U^T D + D^T U = 0` to `tol.tan * (1 + |D|)`.
    pub fn new(base: StiefelPoint, delta: Mat) -> Result<Self, StiefelError> {
        Self::with_tolerance(base, delta, Tolerances::default().tan)
    }

    pub fn with_tolerance(base: StiefelPoint, delta: Mat, tan: f64) -> Result<Self, StiefelError> {
        if delta.shape() != base.as_mat().shape() {
            return Err(StiefelError::Shape {
                expected: base.as_mat().shape(),
                got: delta.shape(),
            });
        }
        let defect = tangency_defect(base.as_mat(), &delta);
        if defect > tan * (1.0 + delta.norm()) {
            return Err(StiefelError::NotTangent { defect });
        }
        Ok(Self::from_parts(base, delta))
    }

    pub(crate) fn from_parts(base: StiefelPoint, delta: Mat) -> Self {
        Self {
            base,
            delta,
            split: OnceLock::new(),
        }
    }

    pub fn zero(base: StiefelPoint) -> Self {
        let (n, p) = base.as_mat().shape();
        Self::from_parts(base, Mat::zeros(n, p))
    }

    pub fn base(&self) -> &StiefelPoint {
        &self.base
    }

    pub fn delta(&self) -> &Mat {
        &self.delta
    }

    pub fn norm(&self) -> f64 {
        self.delta.norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let split = OnceLock::new();
        // B = R keeps a non-negative diagonal only under non-negative scaling
        if let (Some(sp), true) = (self.split.get(), s >= 0.0) {
            let _ = split.set(TangentSplit {
                a: sp.a.scale(s),
                q: sp.q.clone(),
                b: sp.b.scale(s),
            });
        }
        Self {
            base: self.base.clone(),
            delta: self.delta.scale(s),
            split,
        }
    }

    pub fn split(&self) -> &TangentSplit {
        self.split
            .get_or_init(|| split_tangent_with(&self.base, &self.delta, &Tolerances::default()))
    }
}

fn tangency_defect(u: &Mat, delta: &Mat) -> f64 {
    u.t_mul(delta).skew_defect()
}

/// Closest point of `St(n, p)` in Frobenius norm: the orthonormal polar
/// factor `M (M^T M)^{-1/2}`.
pub fn project_point(m: &Mat) -> Result<StiefelPoint, StiefelError> {
    let (n, p) = m.shape();
    if n < p {
        return Err(MatError::TooFewRows { rows: n, cols: p }.into());
    }
    let eig = symmetric_eigen(&m.t_mul(m))?;
    let largest = eig.values[p - 1];
    if eig.values[0] <= 1e-20 * largest.max(1.0) || largest == 0.0 {
        return Err(StiefelError::RankDeficient);
    }
    let inv_sqrt: Vec<f64> = eig.values.iter().map(|l| 1.0 / l.sqrt()).collect();
    let v = &eig.vectors;
    let w = &(v * &Mat::from_diag(&inv_sqrt)) * &v.transpose();
    Ok(StiefelPoint::from_unchecked(m * &w))
}

/// Orthogonal projection of `W` onto the tangent space at `U`:
/// `W - U sym(U^T W)`.
pub fn project_tangent(u: &StiefelPoint, w: &Mat) -> Result<TangentVector, StiefelError> {
    if w.shape() != u.as_mat().shape() {
        return Err(StiefelError::Shape {
            expected: u.as_mat().shape(),
            got: w.shape(),
        });
    }
    let sym = u.as_mat().t_mul(w).sym_part();
    let delta = w - &(u.as_mat() * &sym);
    Ok(TangentVector::from_parts(u.clone(), delta))
}

/// Euclidean metric `tr(D1^T D2)`.
pub fn metric_inner(d1: &TangentVector, d2: &TangentVector) -> Result<f64, StiefelError> {
    let (b1, b2) = (d1.base().as_mat(), d2.base().as_mat());
    if b1.shape() != b2.shape() || b1.dist(b2) > Tolerances::default().orth {
        return Err(StiefelError::BaseMismatch);
    }
    Ok(d1.delta().inner(d2.delta()))
}

/// The same metric in block coordinates `D = U A + U_perp B` with a common
/// complement basis `U_perp`: `tr(A1^T A2) + tr(B1^T B2)`.
pub fn metric_inner_blocks(d1: &TangentVector, d2: &TangentVector) -> Result<f64, StiefelError> {
    let (b1, b2) = (d1.base().as_mat(), d2.base().as_mat());
    if b1.shape() != b2.shape() || b1.dist(b2) > Tolerances::default().orth {
        return Err(StiefelError::BaseMismatch);
    }
    let u = d1.base();
    let perp = u.complement();
    let a1 = u.as_mat().t_mul(d1.delta());
    let a2 = u.as_mat().t_mul(d2.delta());
    let mut total = a1.inner(&a2);
    if perp.cols() > 0 {
        total += perp.t_mul(d1.delta()).inner(&perp.t_mul(d2.delta()));
    }
    Ok(total)
}

pub fn split_tangent(u: &StiefelPoint, delta: &TangentVector) -> Result<TangentSplit, StiefelError> {
    if u.as_mat().dist(delta.base().as_mat()) > Tolerances::default().orth {
        return Err(StiefelError::BaseMismatch);
    }
    Ok(delta.split().clone())
}

/// `A = U^T D`, and `(Q, B)` from the thin QR of `(I - U U^T) D`. Completion
/// columns of `Q` for a rank-deficient normal part are taken orthogonal to
/// `U` while room remains; they always meet zero rows of `B`.
pub(crate) fn split_tangent_with(u: &StiefelPoint, delta: &Mat, tol: &Tolerances) -> TangentSplit {
    let um = u.as_mat();
    let a = um.t_mul(delta).skew_part();
    let normal = delta - &(um * &um.t_mul(delta));
    let qr = thin_qr_avoiding(&normal, um, tol.rank).expect("n >= p holds for a Stiefel point");
    TangentSplit { a, q: qr.q, b: qr.r }
}
