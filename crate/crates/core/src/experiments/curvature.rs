use rayon::prelude::*;

use super::{check_dims, ExperimentError, ExperimentReport, Record};
use crate::frenet::geodesic_frenet_curvatures;
use crate::stiefel::{kappa1_squared, random_point_with, random_tangent_with, sample_rng};

const BOUND_TOL: f64 = 1e-10;
const AGREE_TOL: f64 = 1e-9;

/// First curvature of random unit-speed geodesics, computed from the trace
/// formula and from the analytic Frenet frame.
pub fn curvature_bound_experiment(
    n: usize,
    p: usize,
    samples: usize,
    seed: u64,
) -> Result<ExperimentReport, ExperimentError> {
    check_dims(n, p)?;
    if samples == 0 {
        return Err(ExperimentError::Domain("samples must be at least 1".into()));
    }
    if n == 1 {
        return Err(ExperimentError::Domain("St(1, 1) has no unit-speed geodesics".into()));
    }
    let rows: Vec<Result<Record, ExperimentError>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let u = random_point_with(n, p, &mut rng);
            let d = random_tangent_with(&u, 1.0, &mut rng);
            let split = d.split();
            let trace = kappa1_squared(&split.a, &split.b)?;
            let frenet = geodesic_frenet_curvatures(&split.a, &split.b, 2)?;
            let k1 = frenet.curvatures.first().copied().unwrap_or(0.0);
            let mut r = Record::new();
            r.insert("sample".into(), i.into());
            r.insert("norm_a".into(), split.a.norm().into());
            r.insert("norm_b".into(), split.b.norm().into());
            r.insert("kappa1_sq_trace".into(), trace.into());
            r.insert("kappa1_sq_frenet".into(), (k1 * k1).into());
            r.insert("abs_diff".into(), (trace - k1 * k1).abs().into());
            Ok(r)
        })
        .collect();

    let mut rep = ExperimentReport::new("curvature-bound", n, p, seed, samples);
    rep.records = rows.into_iter().collect::<Result<_, _>>()?;
    rep.push_stat("kappa1_sq_trace", "kappa1_sq_trace");
    rep.push_stat("kappa1_sq_frenet", "kappa1_sq_frenet");
    rep.push_stat("abs_diff", "abs_diff");

    let (arg, max) = rep
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r["kappa1_sq_trace"].as_f64().unwrap_or(f64::NAN)))
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
        );
    let max_diff = rep.summary["abs_diff"].max;
    rep.findings.insert("max_kappa1_sq".into(), max.into());
    rep.findings.insert("argmax_sample".into(), arg.into());
    rep.push_verdict("max kappa1^2 <= 1", max <= 1.0 + BOUND_TOL, max - 1.0, BOUND_TOL);
    rep.push_verdict(
        "trace formula agrees with Frenet frame",
        max_diff <= AGREE_TOL,
        max_diff,
        AGREE_TOL,
    );
    Ok(rep)
}
