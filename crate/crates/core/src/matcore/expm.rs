//! Matrix exponential by scaling and squaring with a degree-13 diagonal
//! Padé approximant.

use super::{Mat, MatError};

/// Coefficients of the [13/13] Padé approximant to `exp`.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the [13/13] approximant is accurate to unit
/// roundoff without scaling.
const THETA13: f64 = 5.371_920_351_148_152;

/// `exp(X) = sum_k X^k / k!` for a square matrix.
pub fn expm(x: &Mat) -> Result<Mat, MatError> {
    if !x.is_square() {
        return Err(MatError::NotSquare {
            rows: x.rows(),
            cols: x.cols(),
        });
    }
    let n = x.rows();
    if n == 1 {
        return Ok(Mat::from_diag(&[x[(0, 0)].exp()]));
    }
    let norm = x.norm_one();
    if norm == 0.0 {
        return Ok(Mat::identity(n));
    }
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scaled = x.scale(0.5f64.powi(squarings as i32));
    let mut e = pade13(&scaled)?;
    for _ in 0..squarings {
        e = &e * &e;
    }
    Ok(e)
}

fn pade13(a: &Mat) -> Result<Mat, MatError> {
    let n = a.rows();
    let b = &PADE13;
    let id = Mat::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let mut w1 = a6.scale(b[13]);
    w1 += &a4.scale(b[11]);
    w1 += &a2.scale(b[9]);
    let mut w2 = &w1 * &a6;
    w2 += &a6.scale(b[7]);
    w2 += &a4.scale(b[5]);
    w2 += &a2.scale(b[3]);
    w2 += &id.scale(b[1]);
    let u = a * &w2;

    let mut z1 = a6.scale(b[12]);
    z1 += &a4.scale(b[10]);
    z1 += &a2.scale(b[8]);
    let mut v = &z1 * &a6;
    v += &a6.scale(b[6]);
    v += &a4.scale(b[4]);
    v += &a2.scale(b[2]);
    v += &id.scale(b[0]);

    // (V - U)^{-1} (V + U)
    (&v - &u).solve(&(&v + &u))
}
