use super::{FrenetData, FrenetError};
use crate::matcore::Mat;
use crate::stiefel::{geodesic_derivative_coeffs, StiefelError};
use crate::Tolerances;

pub fn frenet_from_derivatives(d: &Mat) -> Result<FrenetData, FrenetError> {
    frenet_from_derivatives_with(d, Tolerances::default().rank)
}

/// Gram-Schmidt on the derivative columns `d_1 .. d_m` of a curve.
///
/// A column whose residual is at most `rank_tol * |d_j|` ends the frame.
/// Curvatures are `kappa_j = R_{j+1,j+1} / (R_jj R_11)`, which holds for any
/// regular parametrization. When the frame spans all of `R^N` its last
/// vector is flipped if needed so that the frame is positively oriented;
/// the curvatures are reported unsigned.
pub fn frenet_from_derivatives_with(d: &Mat, rank_tol: f64) -> Result<FrenetData, FrenetError> {
    let (n, m) = d.shape();
    if m > n {
        return Err(FrenetError::Dimension {
            requested: m,
            available: n,
        });
    }
    if m == 0 {
        return Err(FrenetError::DegenerateCurve);
    }
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut r = Mat::zeros(m, m);
    for j in 0..m {
        let col = d.column(j);
        let col_norm = dot(&col, &col).sqrt();
        if j == 0 && col_norm == 0.0 {
            return Err(FrenetError::DegenerateCurve);
        }
        let mut v = col;
        for _ in 0..2 {
            for (i, e) in frame.iter().enumerate() {
                let h = dot(e, &v);
                r[(i, j)] += h;
                for (vk, ek) in v.iter_mut().zip(e) {
                    *vk -= h * ek;
                }
            }
        }
        let res = dot(&v, &v).sqrt();
        if res <= rank_tol * col_norm || res == 0.0 {
            if j == 0 {
                return Err(FrenetError::DegenerateCurve);
            }
            break;
        }
        r[(j, j)] = res;
        v.iter_mut().for_each(|x| *x /= res);
        frame.push(v);
    }
    let k = frame.len();
    let mut r = r.block(0, 0, k, k);
    let mut frame = Mat::from_columns(&frame);
    if k == n && frame.det()? < 0.0 {
        let last: Vec<f64> = frame.column(k - 1).iter().map(|x| -x).collect();
        frame.set_column(k - 1, &last);
        for j in 0..k {
            r[(k - 1, j)] = -r[(k - 1, j)];
        }
    }
    let curvatures = (1..k)
        .map(|j| (r[(j, j)] / (r[(j - 1, j - 1)] * r[(0, 0)])).abs())
        .collect();
    Ok(FrenetData {
        frame,
        r,
        curvatures,
        effective_dim: k,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Frenet data at `t = 0` of the unit-speed geodesic with blocks `(A, B)`,
/// from the first `m` derivatives in frame coordinates.
///
/// The frame `E = Gamma R^{-1}` has a constant generator
/// `E'^T E = R^{-T} Gamma'^T Gamma R^{-1}`; its superdiagonal carries the
/// curvatures.
pub fn geodesic_frenet_curvatures(a: &Mat, b: &Mat, m: usize) -> Result<FrenetData, FrenetError> {
    let coeffs = geodesic_derivative_coeffs(a, b, m.max(1) + 1)?;
    let p = a.rows();
    let dim = 2 * p * p;
    if m > dim {
        return Err(FrenetError::Dimension {
            requested: m,
            available: dim,
        });
    }
    if m == 0 {
        return Err(StiefelError::Order(0).into());
    }
    let speed_squared = a.norm_squared() + b.norm_squared();
    if speed_squared == 0.0 {
        return Err(FrenetError::DegenerateCurve);
    }
    if (speed_squared - 1.0).abs() > 1e-9 {
        return Err(StiefelError::NotUnitSpeed { speed_squared }.into());
    }
    let gamma = Mat::from_columns(&(1..=m).map(|j| coeffs.stacked(j).vectorize()).collect::<Vec<_>>());
    let mut data = frenet_from_derivatives(&gamma)?;
    let k = data.effective_dim;
    let gamma_dot = Mat::from_columns(&(2..=k + 1).map(|j| coeffs.stacked(j).vectorize()).collect::<Vec<_>>());
    // E' = Gamma' R^{-1}, solved as R^T E'^T = Gamma'^T
    let e_dot = data.r.transpose().solve(&gamma_dot.transpose())?.transpose();
    let gen = e_dot.t_mul(&data.frame);
    data.curvatures = (1..k)
        .map(|j| {
            let v = gen[(j - 1, j)];
            if k == dim && j == k - 1 {
                v.abs()
            } else {
                v
            }
        })
        .collect();
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn orthogonal_columns() {
        let d = Mat::from_rows(&[&[2.0, 0.0], &[0.0, 0.0], &[0.0, -3.0]]).unwrap();
        let f = frenet_from_derivatives(&d).unwrap();
        assert_eq!(f.effective_dim, 2);
        assert_eq!(f.r, Mat::from_diag(&[2.0, 3.0]));
        assert_eq!(f.frame.column(1), vec![0.0, 0.0, -1.0]);
        assert!((f.curvatures[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn zero_first_derivative() {
        let d = Mat::zeros(3, 2);
        assert_eq!(frenet_from_derivatives(&d).unwrap_err(), FrenetError::DegenerateCurve);
    }

    #[test]
    fn too_many_columns() {
        let d = Mat::zeros(2, 3);
        assert!(matches!(
            frenet_from_derivatives(&d),
            Err(FrenetError::Dimension {
                requested: 3,
                available: 2
            })
        ));
    }

    #[test]
    fn full_frame_is_positively_oriented() {
        let d = Mat::from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        let f = frenet_from_derivatives(&d).unwrap();
        assert!(f.frame.det().unwrap() > 0.0);
        assert!((&f.frame * &f.r).dist(&d) < 1e-15);
        assert_eq!(f.curvatures, vec![1.0]);
    }

    #[test]
    fn circle_example() {
        let a = Mat::zeros(2, 2);
        let b = Mat::from_diag(&[1.0, 0.0]);
        let f = geodesic_frenet_curvatures(&a, &b, 4).unwrap();
        assert_eq!(f.effective_dim, 2);
        assert!((f.curvatures[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pure_rotation() {
        let a = Mat::from_rows(&[&[0.0, -FRAC_1_SQRT_2], &[FRAC_1_SQRT_2, 0.0]]).unwrap();
        let f = geodesic_frenet_curvatures(&a, &Mat::zeros(2, 2), 3).unwrap();
        assert!((f.curvatures[0] - FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn dimension_cap() {
        let a = Mat::zeros(1, 1);
        let b = Mat::identity(1);
        assert!(geodesic_frenet_curvatures(&a, &b, 2).is_ok());
        assert!(matches!(
            geodesic_frenet_curvatures(&a, &b, 3),
            Err(FrenetError::Dimension {
                requested: 3,
                available: 2
            })
        ));
    }
}
