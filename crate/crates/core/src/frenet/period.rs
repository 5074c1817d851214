use std::f64::consts::TAU;

use serde::Serialize;

use super::{normal_form_with, FrenetError, NormalForm};
use crate::matcore::Mat;
use crate::stiefel::StiefelError;
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Period {
    Closed {
        period: f64,
        /// `2 pi / period`; every frequency is an integer multiple of it.
        fundamental: f64,
        /// `b_i / fundamental`, in component order.
        harmonics: Vec<u64>,
        /// `|c(period) - c(0)|` of the normal form.
        closure_residual: f64,
    },
    NotClosed,
}

impl Period {
    pub fn value(&self) -> Option<f64> {
        match self {
            Period::Closed { period, .. } => Some(*period),
            Period::NotClosed => None,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, Period::Closed { .. })
    }
}

/// Best continued-fraction convergent `p / q` of `x >= 0` with `q <= d_max`
/// and `|x - p/q| <= tol * max(1, x)`.
pub fn rational_approx(x: f64, d_max: u64, tol: f64) -> Option<(u64, u64)> {
    if !x.is_finite() || x < 0.0 {
        return None;
    }
    let target = tol * x.max(1.0);
    let (mut h0, mut h1): (u128, u128) = (0, 1);
    let (mut k0, mut k1): (u128, u128) = (1, 0);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a > 1e18 {
            return None;
        }
        let a = a as u128;
        let h = a.checked_mul(h1)?.checked_add(h0)?;
        let k = a.checked_mul(k1)?.checked_add(k0)?;
        if k > d_max as u128 {
            return None;
        }
        if (x - h as f64 / k as f64).abs() <= target {
            return Some((u64::try_from(h).ok()?, k as u64));
        }
        let frac = rest - rest.floor();
        if frac == 0.0 {
            return None;
        }
        rest = 1.0 / frac;
        (h0, h1) = (h1, h);
        (k0, k1) = (k1, k);
    }
    None
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn minimal_period(nf: &NormalForm) -> Result<Period, FrenetError> {
    minimal_period_with(nf, &Tolerances::default())
}

/// Smallest `T > 0` with `b_i T` in `2 pi Z` for every active frequency.
///
/// Ratios to the smallest frequency are matched to rationals under the
/// denominator cap `tol.d_max`; a candidate period is accepted only if the
/// normal form closes to `tol.closure` there.
pub fn minimal_period_with(nf: &NormalForm, tol: &Tolerances) -> Result<Period, FrenetError> {
    let freqs = nf.frequencies();
    let b_ref = freqs.iter().copied().fold(f64::INFINITY, f64::min);
    if freqs.is_empty() || b_ref <= 0.0 {
        return Err(FrenetError::NoActiveFrequency);
    }
    let mut fracs = Vec::with_capacity(freqs.len());
    for &b in &freqs {
        match rational_approx(b / b_ref, tol.d_max, tol.ratio) {
            Some(f) => fracs.push(f),
            None => return Ok(Period::NotClosed),
        }
    }
    let mut q_all: u128 = 1;
    for &(_, q) in &fracs {
        let q = q as u128;
        q_all = match (q_all / gcd(q_all, q)).checked_mul(q) {
            Some(v) => v,
            None => return Ok(Period::NotClosed),
        };
    }
    let mut ks = Vec::with_capacity(fracs.len());
    for &(p, q) in &fracs {
        match (p as u128).checked_mul(q_all / q as u128) {
            Some(k) => ks.push(k),
            None => return Ok(Period::NotClosed),
        }
    }
    let g = ks.iter().fold(0u128, |acc, &k| gcd(acc, k));
    let fundamental = b_ref * g as f64 / q_all as f64;
    let period = TAU / fundamental;
    let harmonics: Vec<u64> = match ks.iter().map(|&k| u64::try_from(k / g)).collect() {
        Ok(h) => h,
        Err(_) => return Ok(Period::NotClosed),
    };

    let start = nf.evaluate(0.0);
    let closure_residual = nf
        .evaluate(period)
        .iter()
        .zip(&start)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale = 1.0 + nf.components.iter().map(|c| c.amplitude).sum::<f64>();
    if closure_residual > tol.closure * scale {
        return Ok(Period::NotClosed);
    }
    Ok(Period::Closed {
        period,
        fundamental,
        harmonics,
        closure_residual,
    })
}

/// Length of the closed unit-speed geodesic with blocks `(A, B)`, which is
/// its minimal period.
pub fn geodesic_loop_length(a: &Mat, b: &Mat, tol: &Tolerances) -> Result<Period, FrenetError> {
    let nf = normal_form_with(a, b, tol)?;
    let speed_squared = a.norm_squared() + b.norm_squared();
    if (speed_squared - 1.0).abs() > 1e-9 {
        return Err(StiefelError::NotUnitSpeed { speed_squared }.into());
    }
    minimal_period_with(&nf, tol)
}
