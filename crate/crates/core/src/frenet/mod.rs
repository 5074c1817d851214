//! Geodesics viewed as space curves in `R^N`.
//!
//! A Stiefel geodesic in frame coordinates is a matrix curve `C(t)` of size
//! `2p x p`; vectorized (column-major) it lives in `R^N` with `N = 2p^2`
//! and satisfies `vec C(t) = exp(tG) vec(I_p; 0)` for the skew Kronecker sum
//! `G = A (+) X`.

mod frame;
mod normal_form;
mod period;
mod profile;

pub use frame::{frenet_from_derivatives, frenet_from_derivatives_with, geodesic_frenet_curvatures};
pub use normal_form::{normal_form, normal_form_with, Component, NormalForm};
pub use period::{geodesic_loop_length, minimal_period, minimal_period_with, rational_approx, Period};
pub use profile::{central_weights, curvature_profile, CurvatureProfile, ProfileOptions, MAX_DERIVATIVE};

use thiserror::Error;

use crate::matcore::{Mat, MatError};
use crate::stiefel::StiefelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrenetError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Stiefel(#[from] StiefelError),
    #[error("degenerate curve: first derivative vanishes")]
    DegenerateCurve,
    #[error("requested {requested} derivatives but the curve lives in dimension {available}")]
    Dimension { requested: usize, available: usize },
    #[error("derivative order {order} is not supported (maximum {max})")]
    Resolution { order: usize, max: usize },
    #[error("empty parameter grid")]
    EmptyGrid,
    #[error("normal form has no active frequency")]
    NoActiveFrequency,
}

/// Distinguished Frenet frame at one parameter value.
#[derive(Debug, Clone)]
pub struct FrenetData {
    /// `N x k`, columns `e_1 .. e_k`.
    pub frame: Mat,
    /// Upper triangular `k x k` with `D_k = frame * r` for the first `k`
    /// derivative columns `D_k`.
    pub r: Mat,
    /// `kappa_1 .. kappa_{k-1}` per unit arc length.
    pub curvatures: Vec<f64>,
    pub effective_dim: usize,
}
