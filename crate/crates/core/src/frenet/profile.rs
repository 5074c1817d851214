//! Numerical Frenet curvatures of a sampled curve.

use rayon::prelude::*;
use serde::Serialize;

use super::{frenet_from_derivatives_with, FrenetError};
use crate::matcore::Mat;

/// Highest derivative order with a supported stencil.
pub const MAX_DERIVATIVE: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    /// Number of derivatives `m`; curvatures `kappa_1 .. kappa_{m-1}` are reported.
    pub order: usize,
    /// Even accuracy order of the central stencils.
    pub accuracy: usize,
    /// Characteristic time of the curve; the step for derivative `j` is
    /// `eps^(1/(j+4)) * time_scale`.
    pub time_scale: f64,
    /// Relative residual that ends the Gram-Schmidt frame.
    pub rank_tol: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            order: 4,
            accuracy: 4,
            time_scale: 1.0,
            rank_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureProfile {
    pub t: Vec<f64>,
    /// Row `k` holds `kappa_1(t_k) .. kappa_{m-1}(t_k)`; entries past the
    /// effective dimension are 0.
    pub curvatures: Vec<Vec<f64>>,
    pub effective_dim: Vec<usize>,
    /// `|E^T E - I|` of the frame at each `t_k`.
    pub frame_defect: Vec<f64>,
}

impl CurvatureProfile {
    /// `max_k |kappa_j(t_k) - kappa_j(t_0)|` for `j` counted from 1.
    pub fn max_deviation(&self, j: usize) -> f64 {
        let first = self.curvatures[0][j - 1];
        self.curvatures
            .iter()
            .map(|row| (row[j - 1] - first).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_frame_defect(&self) -> f64 {
        self.frame_defect.iter().copied().fold(0.0, f64::max)
    }
}

/// Weights of the central difference for the `d`-th derivative on the
/// integer offsets `-M..=M`, unit spacing.
pub fn central_weights(d: usize, accuracy: usize) -> (Vec<i64>, Vec<f64>) {
    let half = (d + 1) / 2 - 1 + accuracy / 2;
    let offsets: Vec<i64> = (-(half as i64)..=half as i64).collect();
    let x: Vec<f64> = offsets.iter().map(|&o| o as f64).collect();
    (offsets, fornberg(&x, d)[d].clone())
}

/// Fornberg's recursion for finite-difference weights at 0.
fn fornberg(x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0];
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i];
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Frenet curvatures of `curve` at every grid point from central
/// differences of its first `opts.order` derivatives.
pub fn curvature_profile<F>(curve: F, t_grid: &[f64], opts: &ProfileOptions) -> Result<CurvatureProfile, FrenetError>
where
    F: Fn(f64) -> Vec<f64> + Sync,
{
    if t_grid.is_empty() {
        return Err(FrenetError::EmptyGrid);
    }
    let m = opts.order;
    if m == 0 || m > MAX_DERIVATIVE || opts.accuracy == 0 || opts.accuracy % 2 == 1 {
        return Err(FrenetError::Resolution {
            order: m,
            max: MAX_DERIVATIVE,
        });
    }
    let stencils: Vec<(f64, Vec<i64>, Vec<f64>)> = (1..=m)
        .map(|j| {
            let h = f64::EPSILON.powf(1.0 / (j as f64 + 4.0)) * opts.time_scale;
            let (o, w) = central_weights(j, opts.accuracy);
            (h, o, w)
        })
        .collect();

    let rows: Vec<Result<(Vec<f64>, usize, f64), FrenetError>> = t_grid
        .par_iter()
        .map(|&t| {
            let columns: Vec<Vec<f64>> = stencils
                .iter()
                .enumerate()
                .map(|(idx, (h, offsets, weights))| {
                    let mut acc: Vec<f64> = Vec::new();
                    for (&o, &w) in offsets.iter().zip(weights) {
                        if w == 0.0 {
                            continue;
                        }
                        let y = curve(t + o as f64 * h);
                        if acc.is_empty() {
                            acc = vec![0.0; y.len()];
                        }
                        acc.iter_mut().zip(&y).for_each(|(a, yi)| *a += w * yi);
                    }
                    let scale = h.powi(idx as i32 + 1);
                    acc.iter_mut().for_each(|a| *a /= scale);
                    acc
                })
                .collect();
            let data = frenet_from_derivatives_with(&Mat::from_columns(&columns), opts.rank_tol)?;
            let mut kappas = data.curvatures.clone();
            kappas.resize(m - 1, 0.0);
            Ok((kappas, data.effective_dim, data.frame.orthonormality_defect()))
        })
        .collect();

    let mut profile = CurvatureProfile {
        t: t_grid.to_vec(),
        curvatures: Vec::with_capacity(t_grid.len()),
        effective_dim: Vec::with_capacity(t_grid.len()),
        frame_defect: Vec::with_capacity(t_grid.len()),
    };
    for row in rows {
        let (k, dim, defect) = row?;
        profile.curvatures.push(k);
        profile.effective_dim.push(dim);
        profile.frame_defect.push(defect);
    }
    Ok(profile)
}
