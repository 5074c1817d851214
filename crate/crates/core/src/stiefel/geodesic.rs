//! Closed-form geodesics
//!
//! `gamma(t) = [U Q] exp(t X) [I_p; 0] exp(-t A)` with the skew generator
//! `X = [[2A, -B^T], [B, 0]]`, where `A = U^T D` and `Q B = (I - U U^T) D`.
//! Derivatives share the same form with `[I_p; 0]` replaced by the
//! coefficient blocks `(M_j; N_j)` of [`GeodesicCoeffs`].

use super::{StiefelError, StiefelPoint, TangentVector};
use crate::matcore::{expm, Mat, MatError};
use crate::Tolerances;

/// `X = [[2A, -B^T], [B, 0]]`
pub fn generator(a: &Mat, b: &Mat) -> Mat {
    let p = a.rows();
    assert!(a.is_square() && b.shape() == (p, p), "A and B must both be p x p");
    let mut x = Mat::zeros(2 * p, 2 * p);
    x.set_block(0, 0, &a.scale(2.0));
    x.set_block(0, p, &b.transpose().scale(-1.0));
    x.set_block(p, 0, b);
    x
}

fn check_skew(a: &Mat) -> Result<(), StiefelError> {
    if !a.is_square() {
        return Err(MatError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        }
        .into());
    }
    let defect = a.skew_defect();
    if defect > Tolerances::default().skew * (1.0 + a.norm()) {
        return Err(MatError::NotSkew { defect }.into());
    }
    Ok(())
}

fn check_pair(a: &Mat, b: &Mat) -> Result<(), StiefelError> {
    check_skew(a)?;
    if b.shape() != a.shape() {
        return Err(StiefelError::Shape {
            expected: a.shape(),
            got: b.shape(),
        });
    }
    Ok(())
}

/// Derivative coefficients of a geodesic in frame coordinates.
#[derive(Debug, Clone)]
pub struct GeodesicCoeffs {
    pub a: Mat,
    pub b: Mat,
    /// `(M_j, N_j)` for `j = 0..=j_max`.
    pub blocks: Vec<(Mat, Mat)>,
}

impl GeodesicCoeffs {
    pub fn j_max(&self) -> usize {
        self.blocks.len() - 1
    }

    /// `[M_j; N_j]` as a `2p x p` matrix.
    pub fn stacked(&self, j: usize) -> Mat {
        let (m, n) = &self.blocks[j];
        m.vstack(n)
    }

    /// `tr(M_j^T M_j + N_j^T N_j)`, the constant value of `|gamma^(j)(t)|^2`.
    pub fn norm_squared(&self, j: usize) -> f64 {
        let (m, n) = &self.blocks[j];
        (&m.t_mul(m) + &n.t_mul(n)).trace()
    }
}

/// Runs `(M_{j+1}; N_{j+1}) = X (M_j; N_j) - (M_j A; N_j A)` from
/// `(M_0; N_0) = (I_p; 0)`.
pub fn geodesic_derivative_coeffs(a: &Mat, b: &Mat, j_max: usize) -> Result<GeodesicCoeffs, StiefelError> {
    check_pair(a, b)?;
    if j_max < 1 {
        return Err(StiefelError::Order(j_max));
    }
    let p = a.rows();
    let x = generator(a, b);
    let mut blocks = Vec::with_capacity(j_max + 1);
    let mut cur = Mat::eye_rect(2 * p, p);
    blocks.push((cur.block(0, 0, p, p), cur.block(p, 0, p, p)));
    for _ in 0..j_max {
        cur = &(&x * &cur) - &(&cur * a);
        blocks.push((cur.block(0, 0, p, p), cur.block(p, 0, p, p)));
    }
    Ok(GeodesicCoeffs {
        a: a.clone(),
        b: b.clone(),
        blocks,
    })
}

/// Squared first Frenet curvature of the unit-speed geodesic with data
/// `(A, B)`: `tr(A^4) + tr((2 A^T A + B^T B) B^T B)`.
pub fn kappa1_squared(a: &Mat, b: &Mat) -> Result<f64, StiefelError> {
    check_pair(a, b)?;
    let speed_squared = a.norm_squared() + b.norm_squared();
    if speed_squared == 0.0 {
        // constant curve
        return Ok(0.0);
    }
    if (speed_squared - 1.0).abs() > 1e-9 {
        return Err(StiefelError::NotUnitSpeed { speed_squared });
    }
    let a2 = a * a;
    let btb = b.t_mul(b);
    let ata = a.t_mul(a);
    let left = &ata.scale(2.0) + &btb;
    Ok((&a2 * &a2).trace() + (&left * &btb).trace())
}

/// Geodesic `t -> Exp_U(t D)` with the frame and generator precomputed.
#[derive(Debug, Clone)]
pub struct GeodesicCurve {
    /// `[U Q]`, `n x 2p`.
    pub frame: Mat,
    /// `X = [[2A, -B^T], [B, 0]]`.
    pub generator: Mat,
    pub a: Mat,
    pub b: Mat,
    /// `|D|`
    pub speed: f64,
}

pub fn geodesic_curve(tangent: &TangentVector) -> GeodesicCurve {
    let split = tangent.split();
    GeodesicCurve {
        frame: tangent.base().as_mat().hstack(&split.q),
        generator: generator(&split.a, &split.b),
        a: split.a.clone(),
        b: split.b.clone(),
        speed: tangent.norm(),
    }
}

impl GeodesicCurve {
    pub fn p(&self) -> usize {
        self.a.rows()
    }

    /// `exp(tX) C exp(-tA)` for a `2p x p` coefficient block `C`.
    fn flow(&self, t: f64, c: &Mat) -> Mat {
        let ex = expm(&self.generator.scale(t)).expect("generator is square");
        let ea = expm(&self.a.scale(-t)).expect("A is square");
        &(&ex * c) * &ea
    }

    /// Curve in frame coordinates, a `2p x p` matrix.
    pub fn coordinates(&self, t: f64) -> Mat {
        let p = self.p();
        self.flow(t, &Mat::eye_rect(2 * p, p))
    }

    pub fn evaluate_mat(&self, t: f64) -> Mat {
        &self.frame * &self.coordinates(t)
    }

    pub fn evaluate(&self, t: f64) -> StiefelPoint {
        StiefelPoint::from_unchecked(self.evaluate_mat(t))
    }

    /// `gamma^(j)(t) = [U Q] exp(tX) (M_j; N_j) exp(-tA)`.
    pub fn derivative(&self, t: f64, j: usize) -> Mat {
        let p = self.p();
        let block = if j == 0 {
            Mat::eye_rect(2 * p, p)
        } else {
            geodesic_derivative_coeffs(&self.a, &self.b, j)
                .expect("A is skew by construction")
                .stacked(j)
        };
        &self.frame * &self.flow(t, &block)
    }

    /// Velocity `gamma'(t)` as a tangent vector at `gamma(t)`.
    pub fn velocity(&self, t: f64) -> TangentVector {
        TangentVector::from_parts(self.evaluate(t), self.derivative(t, 1))
    }

    pub fn coeffs(&self, j_max: usize) -> GeodesicCoeffs {
        geodesic_derivative_coeffs(&self.a, &self.b, j_max).expect("A is skew by construction")
    }
}

/// `Exp_U(D) = [U Q] exp_m([[2A, -B^T], [B, 0]]) [I_p; 0] exp_m(-A)`.
pub fn stiefel_exp(u: &StiefelPoint, delta: &Mat) -> Result<StiefelPoint, StiefelError> {
    let tangent = TangentVector::new(u.clone(), delta.clone())?;
    Ok(geodesic_curve(&tangent).evaluate(1.0))
}

impl TangentVector {
    pub fn exp(&self) -> StiefelPoint {
        geodesic_curve(self).evaluate(1.0)
    }
}
