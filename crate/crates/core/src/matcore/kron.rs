use super::{Mat, MatError};

/// Kronecker sum `A kron I_q + I_p kron X` for square `A` (p x p) and `X` (q x q).
///
/// With column-major vectorization, `vec(exp(tX) C exp(-tA))` equals
/// `exp(t * kron_sum(A, X)) vec(C)` whenever `A` is skew.
pub fn kron_sum(a: &Mat, x: &Mat) -> Result<Mat, MatError> {
    for m in [a, x] {
        if !m.is_square() {
            return Err(MatError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
    }
    let p = a.rows();
    let q = x.rows();
    let mut g = Mat::zeros(p * q, p * q);
    for i in 0..p {
        for j in 0..p {
            let aij = a[(i, j)];
            if aij != 0.0 {
                for k in 0..q {
                    g[(i * q + k, j * q + k)] += aij;
                }
            }
        }
        for k in 0..q {
            for l in 0..q {
                g[(i * q + k, i * q + l)] += x[(k, l)];
            }
        }
    }
    Ok(g)
}
