//! Dense real-matrix kernel: matrix exponential, thin QR, skew spectra,
//! Kronecker sums.

mod eigen;
mod expm;
mod kron;
mod mat;
mod qr;

pub use eigen::{skew_spectrum, skew_spectrum_with, symmetric_eigen, SkewSpectrum, SymmetricEigen};
pub use expm::expm;
pub use kron::kron_sum;
pub use mat::Mat;
pub use qr::{thin_qr, thin_qr_avoiding, ThinQr};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("thin QR needs rows >= cols, got {rows}x{cols}")]
    TooFewRows { rows: usize, cols: usize },
    #[error("matrix is not skew-symmetric: |S + S^T| = {defect:.3e}")]
    NotSkew { defect: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("data length mismatch: expected {expected}, got {got}")]
    InvalidData { expected: usize, got: usize },
    #[error("rows have different lengths")]
    Ragged,
    #[error("matrix has no entries")]
    Empty,
    #[error("eigensolver did not converge")]
    NoConvergence,
}
