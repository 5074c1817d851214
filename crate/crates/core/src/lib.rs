//! Numerical toolkit for the compact Stiefel manifold `St(n, p)` under the
//! Euclidean metric.
//!
//! * [`matcore`]: dense matrix kernel (exponential, thin QR, skew spectra).
//! * [`stiefel`]: points, tangents, closed-form geodesics, the derivative
//!   recursion and a shooting logarithm.
//! * [`frenet`]: Frenet frames and curvatures, constant-curvature normal
//!   forms, period detection.
//! * [`experiments`]: seeded batch validation of curvature, closed-geodesic
//!   and injectivity-radius claims.

pub mod experiments;
pub mod frenet;
pub mod matcore;
pub mod stiefel;
mod tolerance;

pub use matcore::{Mat, MatError};
pub use tolerance::Tolerances;
