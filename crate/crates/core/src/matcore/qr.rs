//! Thin QR by Gram-Schmidt with reorthogonalization.
//!
//! Conventions: `R` has a non-negative diagonal. A column whose residual
//! after projection is at most `rank_tol * (|m_j| + 1)` is treated as zero;
//! its diagonal entry is set to 0 and the matching column of `Q` is filled
//! by the first standard basis vector `e_k` (in index order) that survives
//! orthogonalization against every other column of `Q`.

use super::{Mat, MatError};
use crate::Tolerances;

#[derive(Debug, Clone)]
pub struct ThinQr {
    pub q: Mat,
    pub r: Mat,
    /// Column indices whose diagonal entry in `R` is zero.
    pub deficient: Vec<usize>,
}

impl ThinQr {
    pub fn rank(&self) -> usize {
        self.r.cols() - self.deficient.len()
    }
}

pub fn thin_qr(m: &Mat) -> Result<ThinQr, MatError> {
    factor(m, None, Tolerances::default().rank)
}

/// Thin QR where completion columns for rank-deficient inputs are also
/// chosen orthogonal to the columns of `avoid`, as long as room remains in
/// the complement of `avoid`.
pub fn thin_qr_avoiding(m: &Mat, avoid: &Mat, rank_tol: f64) -> Result<ThinQr, MatError> {
    if avoid.rows() != m.rows() {
        return Err(MatError::DimensionMismatch {
            op: "thin_qr_avoiding",
            left: m.shape(),
            right: avoid.shape(),
        });
    }
    factor(m, Some(avoid), rank_tol)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Removes the components of `v` along `basis`, twice. Returns the
/// accumulated coefficients.
fn project_out(v: &mut [f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (c, q) in coeffs.iter_mut().zip(basis) {
            let h = dot(q, v);
            *c += h;
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= h * qi;
            }
        }
    }
    coeffs
}

fn factor(m: &Mat, avoid: Option<&Mat>, rank_tol: f64) -> Result<ThinQr, MatError> {
    let (n, p) = m.shape();
    if n < p {
        return Err(MatError::TooFewRows { rows: n, cols: p });
    }
    let mut slots: Vec<Option<Vec<f64>>> = vec![None; p];
    let mut r = Mat::zeros(p, p);
    let mut deficient = Vec::new();

    for j in 0..p {
        let col = m.column(j);
        let col_norm = norm(&col);
        let mut v = col;
        let (idx, basis): (Vec<usize>, Vec<Vec<f64>>) = slots
            .iter()
            .enumerate()
            .filter_map(|(i, q)| q.clone().map(|q| (i, q)))
            .unzip();
        let coeffs = project_out(&mut v, &basis);
        for (i, c) in idx.into_iter().zip(coeffs) {
            r[(i, j)] = c;
        }
        let res = norm(&v);
        if res <= rank_tol * (col_norm + 1.0) {
            deficient.push(j);
        } else {
            v.iter_mut().for_each(|x| *x /= res);
            r[(j, j)] = res;
            slots[j] = Some(v);
        }
    }

    if !deficient.is_empty() {
        let avoid_cols: Vec<Vec<f64>> = match avoid {
            Some(a) => (0..a.cols()).map(|j| a.column(j)).collect(),
            None => Vec::new(),
        };
        for &j in &deficient {
            let taken: Vec<Vec<f64>> = slots.iter().flatten().cloned().collect();
            let q = complete(n, &taken, &avoid_cols)
                .or_else(|| complete(n, &taken, &[]))
                .expect("n >= p leaves room for an orthonormal completion");
            slots[j] = Some(q);
        }
    }

    let q = Mat::from_columns(&slots.into_iter().map(Option::unwrap).collect::<Vec<_>>());
    Ok(ThinQr { q, r, deficient })
}

/// First standard basis vector that keeps a healthy residual after
/// projecting out `taken` and `avoid`.
fn complete(n: usize, taken: &[Vec<f64>], avoid: &[Vec<f64>]) -> Option<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = taken.to_vec();
    if !avoid.is_empty() {
        // orthonormalize the avoided span before projecting against it
        for a in avoid {
            let mut v = a.clone();
            project_out(&mut v, &basis);
            let nv = norm(&v);
            if nv > 1e-8 {
                v.iter_mut().for_each(|x| *x /= nv);
                basis.push(v);
            }
        }
    }
    if basis.len() >= n {
        return None;
    }
    (0..n).find_map(|k| {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        project_out(&mut e, &basis);
        let ne = norm(&e);
        (ne > 0.5).then(|| e.into_iter().map(|x| x / ne).collect())
    })
}
