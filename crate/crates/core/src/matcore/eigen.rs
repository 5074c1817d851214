//! Symmetric eigenproblems (cyclic Jacobi) and real spectral data of skew
//! matrices.

use super::{Mat, MatError};
use crate::Tolerances;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `M = V diag(values) V^T`, values ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: Mat,
}

/// Cyclic Jacobi eigensolver for a symmetric matrix. Only the symmetric
/// part of the input is used.
pub fn symmetric_eigen(m: &Mat) -> Result<SymmetricEigen, MatError> {
    if !m.is_square() {
        return Err(MatError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.sym_part();
    let mut v = Mat::identity(n);
    let total = a.norm();
    if total == 0.0 {
        return Ok(SymmetricEigen {
            values: vec![0.0; n],
            vectors: v,
        });
    }

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-3 * total {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(MatError::NoConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen { values, vectors })
}

/// Real spectral data of a skew-symmetric matrix `S`.
///
/// For every plane `(u, v)` with frequency `theta > 0`:
/// `S u = theta v` and `S v = -theta u`, so `exp(tS) u = cos(theta t) u + sin(theta t) v`.
#[derive(Debug, Clone)]
pub struct SkewSpectrum {
    /// Frequencies in non-increasing order.
    pub frequencies: Vec<f64>,
    pub planes: Vec<(Vec<f64>, Vec<f64>)>,
    pub kernel_basis: Vec<Vec<f64>>,
}

impl SkewSpectrum {
    pub fn order(&self) -> usize {
        2 * self.planes.len() + self.kernel_basis.len()
    }

    /// `sum_i theta_i (v_i u_i^T - u_i v_i^T)`
    pub fn reconstruct(&self) -> Mat {
        let n = self.order();
        let mut s = Mat::zeros(n, n);
        for (theta, (u, v)) in self.frequencies.iter().zip(&self.planes) {
            for i in 0..n {
                for j in 0..n {
                    s[(i, j)] += theta * (v[i] * u[j] - u[i] * v[j]);
                }
            }
        }
        s
    }

    /// Largest pairwise inner product defect among all plane and kernel vectors.
    pub fn orthonormality_defect(&self) -> f64 {
        let vectors: Vec<&Vec<f64>> = self
            .planes
            .iter()
            .flat_map(|(u, v)| [u, v])
            .chain(&self.kernel_basis)
            .collect();
        let mut worst: f64 = 0.0;
        for (i, a) in vectors.iter().enumerate() {
            for (j, b) in vectors.iter().enumerate().skip(i) {
                let d = dot(a, b) - if i == j { 1.0 } else { 0.0 };
                worst = worst.max(d.abs());
            }
        }
        worst
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn orthogonalize(v: &mut [f64], basis: &[&Vec<f64>]) -> f64 {
    for _ in 0..2 {
        for q in basis {
            let h = dot(q, v);
            for (vi, qi) in v.iter_mut().zip(q.iter()) {
                *vi -= h * qi;
            }
        }
    }
    dot(v, v).sqrt()
}

pub fn skew_spectrum(s: &Mat) -> Result<SkewSpectrum, MatError> {
    skew_spectrum_with(s, &Tolerances::default())
}

/// Frequencies come from the symmetric eigenproblem of `S^T S`; each
/// rotation plane is recovered as `(u, S u / |S u|)` from an eigenvector `u`.
pub fn skew_spectrum_with(s: &Mat, tol: &Tolerances) -> Result<SkewSpectrum, MatError> {
    if !s.is_square() {
        return Err(MatError::NotSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    let defect = s.skew_defect();
    if defect > tol.skew * (1.0 + s.norm()) {
        return Err(MatError::NotSkew { defect });
    }
    let s = s.skew_part();
    let n = s.rows();
    let eig = symmetric_eigen(&s.t_mul(&s))?;
    let theta_max = eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let zero = tol.zero_freq * theta_max.max(1.0);

    let mut frequencies = Vec::new();
    let mut planes: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for k in (0..n).rev() {
        if eig.values[k].max(0.0).sqrt() <= zero || 2 * planes.len() + 2 > n {
            break;
        }
        let mut u = eig.vectors.column(k);
        let accepted: Vec<&Vec<f64>> = planes.iter().flat_map(|(a, b)| [a, b]).collect();
        let nu = orthogonalize(&mut u, &accepted);
        if nu < 0.1 {
            continue;
        }
        u.iter_mut().for_each(|x| *x /= nu);
        let mut v = s.mul_vec(&u);
        let mut with_u = accepted.clone();
        with_u.push(&u);
        let nv = orthogonalize(&mut v, &with_u);
        if nv <= zero {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        let theta = dot(&s.mul_vec(&u), &v);
        frequencies.push(theta);
        planes.push((u, v));
    }

    let kernel_dim = n - 2 * planes.len();
    let mut kernel_basis: Vec<Vec<f64>> = Vec::with_capacity(kernel_dim);
    let candidates = (0..n).map(|k| eig.vectors.column(k)).chain((0..n).map(|k| {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        e
    }));
    for mut x in candidates {
        if kernel_basis.len() == kernel_dim {
            break;
        }
        let basis: Vec<&Vec<f64>> = planes.iter().flat_map(|(a, b)| [a, b]).chain(&kernel_basis).collect();
        let nx = orthogonalize(&mut x, &basis);
        if nx > 0.5 {
            x.iter_mut().for_each(|y| *y /= nx);
            kernel_basis.push(x);
        }
    }

    // keep frequencies sorted non-increasing after possible skips
    let mut idx: Vec<usize> = (0..frequencies.len()).collect();
    idx.sort_by(|&a, &b| frequencies[b].total_cmp(&frequencies[a]));
    let frequencies = idx.iter().map(|&i| frequencies[i]).collect();
    let planes = idx.iter().map(|&i| planes[i].clone()).collect();
    Ok(SkewSpectrum {
        frequencies,
        planes,
        kernel_basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot(theta: f64) -> Mat {
        Mat::from_rows(&[&[0.0, -theta], &[theta, 0.0]]).unwrap()
    }

    #[test]
    fn single_rotation() {
        let sp = skew_spectrum(&rot(2.0)).unwrap();
        assert_eq!(sp.frequencies.len(), 1);
        assert!((sp.frequencies[0] - 2.0).abs() < 1e-14);
        assert!(sp.kernel_basis.is_empty());
    }

    #[test]
    fn zero_matrix_is_all_kernel() {
        let sp = skew_spectrum(&Mat::zeros(4, 4)).unwrap();
        assert!(sp.frequencies.is_empty());
        assert_eq!(sp.kernel_basis.len(), 4);
        assert!(sp.orthonormality_defect() < 1e-15);
    }

    #[test]
    fn block_diagonal_decouples() {
        let mut s = Mat::zeros(4, 4);
        s.set_block(0, 0, &rot(1.0));
        s.set_block(2, 2, &rot(3.0));
        let sp = skew_spectrum(&s).unwrap();
        assert_eq!(sp.frequencies.len(), 2);
        assert!((sp.frequencies[0] - 3.0).abs() < 1e-13);
        assert!((sp.frequencies[1] - 1.0).abs() < 1e-13);
        assert!(sp.reconstruct().dist(&s) < 1e-12);
    }

    #[test]
    fn repeated_frequencies_and_odd_order() {
        let mut s = Mat::zeros(5, 5);
        s.set_block(0, 0, &rot(1.5));
        s.set_block(2, 2, &rot(1.5));
        let sp = skew_spectrum(&s).unwrap();
        assert_eq!(sp.frequencies.len(), 2);
        assert_eq!(sp.kernel_basis.len(), 1);
        assert_eq!(sp.order(), 5);
        assert!(sp.reconstruct().dist(&s) < 1e-12);
        assert!(sp.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn rejects_non_skew() {
        let m = Mat::identity(2);
        assert!(matches!(skew_spectrum(&m), Err(MatError::NotSkew { .. })));
    }

    #[test]
    fn jacobi_diagonalizes() {
        let m = Mat::from_rows(&[&[4.0, 1.0, 0.5], &[1.0, 3.0, 0.2], &[0.5, 0.2, 1.0]]).unwrap();
        let e = symmetric_eigen(&m).unwrap();
        let d = Mat::from_diag(&e.values);
        let back = &(&e.vectors * &d) * &e.vectors.transpose();
        assert!(back.dist(&m) < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        // trace and determinant are spectral invariants
        assert!((e.values.iter().sum::<f64>() - m.trace()).abs() < 1e-13);
        let prod: f64 = e.values.iter().product();
        assert!((prod - m.det().unwrap()).abs() < 1e-12);
    }
}
