use serde::Serialize;

use super::FrenetError;
use crate::matcore::{kron_sum, skew_spectrum_with, Mat};
use crate::stiefel::{generator, geodesic_derivative_coeffs};
use crate::Tolerances;

/// One rotation `a (cos(b t) e_1 + sin(b t) e_2)`.
#[derive(Debug, Clone, Serialize)]
pub struct Component {
    pub amplitude: f64,
    pub frequency: f64,
    pub plane: (Vec<f64>, Vec<f64>),
}

/// `vec C(t) = dc_offset + sum_i a_i (cos(b_i t) e_i1 + sin(b_i t) e_i2)`
/// with pairwise distinct frequencies `b_i`, sorted non-increasing.
#[derive(Debug, Clone, Serialize)]
pub struct NormalForm {
    pub components: Vec<Component>,
    pub dc_offset: Vec<f64>,
    /// `2p^2`
    pub source_dim: usize,
}

impl NormalForm {
    pub fn frequencies(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.frequency).collect()
    }

    pub fn dc_offset_norm(&self) -> f64 {
        self.dc_offset.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `sum a_i^2 b_i^2`, the squared speed.
    pub fn speed_squared(&self) -> f64 {
        self.components
            .iter()
            .map(|c| (c.amplitude * c.frequency).powi(2))
            .sum()
    }

    /// `sum a_i^2 b_i^4`, the squared acceleration.
    pub fn acceleration_squared(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.amplitude.powi(2) * c.frequency.powi(4))
            .sum()
    }

    pub fn evaluate(&self, t: f64) -> Vec<f64> {
        let mut out = self.dc_offset.clone();
        for c in &self.components {
            let (s, co) = (c.frequency * t).sin_cos();
            for (o, (u, v)) in out.iter_mut().zip(c.plane.0.iter().zip(&c.plane.1)) {
                *o += c.amplitude * (co * u + s * v);
            }
        }
        out
    }
}

pub fn normal_form(a: &Mat, b: &Mat) -> Result<NormalForm, FrenetError> {
    normal_form_with(a, b, &Tolerances::default())
}

/// Normal form of the geodesic with blocks `(A, B)` in frame coordinates.
///
/// Frequencies within `tol.freq * max frequency` of each other are merged;
/// the merged amplitude is the norm of the projection of `vec(I_p; 0)` onto
/// the joint invariant subspace. Components with amplitude at most
/// `1e-12 * |vec(I_p; 0)|` are dropped.
pub fn normal_form_with(a: &Mat, b: &Mat, tol: &Tolerances) -> Result<NormalForm, FrenetError> {
    geodesic_derivative_coeffs(a, b, 1)?;
    let p = a.rows();
    let g = kron_sum(a, &generator(a, b))?;
    let c = Mat::eye_rect(2 * p, p).vectorize();
    let c_norm = dot(&c, &c).sqrt();
    let spec = skew_spectrum_with(&g, tol)?;

    let theta_max = spec.frequencies.first().copied().unwrap_or(0.0);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &theta) in spec.frequencies.iter().enumerate() {
        match groups.last_mut() {
            Some(grp) if (spec.frequencies[grp[0]] - theta).abs() <= tol.freq * theta_max => grp.push(i),
            _ => groups.push(vec![i]),
        }
    }

    let mut components = Vec::new();
    for grp in groups {
        let mut proj = vec![0.0; c.len()];
        let mut mass = 0.0;
        let mut weighted = 0.0;
        for &i in &grp {
            let (u, v) = &spec.planes[i];
            let (cu, cv) = (dot(&c, u), dot(&c, v));
            for (pk, (uk, vk)) in proj.iter_mut().zip(u.iter().zip(v)) {
                *pk += cu * uk + cv * vk;
            }
            let m = cu * cu + cv * cv;
            mass += m;
            weighted += m * spec.frequencies[i] * spec.frequencies[i];
        }
        let amplitude = dot(&proj, &proj).sqrt();
        if amplitude <= 1e-12 * c_norm {
            continue;
        }
        let frequency = (weighted / mass).sqrt();
        let e1: Vec<f64> = proj.iter().map(|x| x / amplitude).collect();
        let mut e2 = g.mul_vec(&e1);
        // remove rounding leakage along e1 before normalizing
        let h = dot(&e1, &e2);
        e2.iter_mut().zip(&e1).for_each(|(y, x)| *y -= h * x);
        let n2 = dot(&e2, &e2).sqrt();
        e2.iter_mut().for_each(|x| *x /= n2);
        components.push(Component {
            amplitude,
            frequency,
            plane: (e1, e2),
        });
    }

    let mut dc_offset = vec![0.0; c.len()];
    for k in &spec.kernel_basis {
        let h = dot(&c, k);
        dc_offset.iter_mut().zip(k).for_each(|(d, x)| *d += h * x);
    }
    Ok(NormalForm {
        components,
        dc_offset,
        source_dim: 2 * p * p,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
