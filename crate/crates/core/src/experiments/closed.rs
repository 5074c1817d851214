use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use rayon::prelude::*;

use super::{check_dims, klingenberg_bound, ExperimentError, ExperimentReport, Record, Value};
use crate::frenet::{geodesic_loop_length, Period};
use crate::matcore::Mat;
use crate::stiefel::{
    geodesic_curve, random_point_with, random_tangent_with, sample_rng, GeodesicCurve, StiefelPoint, TangentVector,
};
use crate::Tolerances;

const LENGTH_TOL: f64 = 1e-6;
const CLOSURE_TOL: f64 = 1e-8;

/// Unit-speed closed geodesic through `[I_p; 0]` and its period.
#[derive(Debug, Clone)]
pub struct ClosedGeodesic {
    pub tangent: TangentVector,
    pub period: f64,
}

/// For `n > p` the planar circle `Delta = e_{p+1} e_1^T` of period `2 pi`.
/// For `n = p >= 2` there is no normal direction; the rotation
/// `A = (e_2 e_1^T - e_1 e_2^T) / sqrt(2)` is used, whose period is
/// `2 pi sqrt(2)`.
pub fn make_closed_geodesic(n: usize, p: usize) -> Result<ClosedGeodesic, ExperimentError> {
    check_dims(n, p)?;
    if n == 1 {
        return Err(ExperimentError::Domain(
            "St(1, 1) is a single point and has no closed geodesic".into(),
        ));
    }
    let u = StiefelPoint::standard(n, p);
    let mut d = Mat::zeros(n, p);
    let period = if n > p {
        d[(p, 0)] = 1.0;
        TAU
    } else {
        d[(1, 0)] = FRAC_1_SQRT_2;
        d[(0, 1)] = -FRAC_1_SQRT_2;
        TAU * std::f64::consts::SQRT_2
    };
    Ok(ClosedGeodesic {
        tangent: TangentVector::new(u, d)?,
        period,
    })
}

/// `int_{t0}^{t1} |gamma'(t)| dt` by composite Simpson on `intervals`
/// (rounded up to even) subintervals.
pub fn measured_length(curve: &GeodesicCurve, t0: f64, t1: f64, intervals: usize) -> f64 {
    let m = (intervals.max(2) + 1) / 2 * 2;
    let h = (t1 - t0) / m as f64;
    let speed = |t: f64| curve.derivative(t, 1).norm();
    let mut sum = speed(t0) + speed(t1);
    for k in 1..m {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * speed(t0 + k as f64 * h);
    }
    sum * h / 3.0
}

struct Candidate {
    family: String,
    structured: bool,
    tangent: TangentVector,
}

fn diag_family(n: usize, p: usize, ratios: &[f64]) -> Option<Candidate> {
    if ratios.len() > p.min(n - p) {
        return None;
    }
    let scale = ratios.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut d = Mat::zeros(n, p);
    for (k, r) in ratios.iter().enumerate() {
        d[(p + k, k)] = r / scale;
    }
    let label: Vec<String> = ratios.iter().map(|r| format!("{r}")).collect();
    Some(Candidate {
        family: format!("b-diag-{}", label.join("-")),
        structured: true,
        tangent: TangentVector::new(StiefelPoint::standard(n, p), d).ok()?,
    })
}

fn rotation_family(n: usize, p: usize, ratios: &[f64]) -> Option<Candidate> {
    if 2 * ratios.len() > p {
        return None;
    }
    let scale = (2.0 * ratios.iter().map(|x| x * x).sum::<f64>()).sqrt();
    let mut d = Mat::zeros(n, p);
    for (k, r) in ratios.iter().enumerate() {
        d[(2 * k + 1, 2 * k)] = r / scale;
        d[(2 * k, 2 * k + 1)] = -r / scale;
    }
    let label: Vec<String> = ratios.iter().map(|r| format!("{r}")).collect();
    Some(Candidate {
        family: format!("a-rot-{}", label.join("-")),
        structured: true,
        tangent: TangentVector::new(StiefelPoint::standard(n, p), d).ok()?,
    })
}

fn structured(n: usize, p: usize) -> Vec<Candidate> {
    let mut out = Vec::new();
    if let Ok(c) = make_closed_geodesic(n, p) {
        out.push(Candidate {
            family: "circle".into(),
            structured: true,
            tangent: c.tangent,
        });
    }
    if n > p {
        let sets: [&[f64]; 9] = [
            &[1.0, 1.0],
            &[2.0, 1.0],
            &[3.0, 1.0],
            &[3.0, 2.0],
            &[5.0, 3.0],
            &[1.0, 1.0, 1.0],
            &[2.0, 1.0, 1.0],
            &[3.0, 2.0, 1.0],
            &[4.0, 3.0, 2.0, 1.0],
        ];
        out.extend(sets.iter().filter_map(|s| diag_family(n, p, s)));
    }
    let sets: [&[f64]; 3] = [&[1.0], &[2.0, 1.0], &[1.0, 1.0]];
    out.extend(sets.iter().filter_map(|s| rotation_family(n, p, s)));
    out
}

fn examine(c: &Candidate, index: usize, tol: &Tolerances) -> Result<Record, ExperimentError> {
    let split = c.tangent.split();
    let period = geodesic_loop_length(&split.a, &split.b, tol)?;
    let mut r = Record::new();
    r.insert("sample".into(), index.into());
    r.insert("family".into(), c.family.as_str().into());
    r.insert("structured".into(), c.structured.into());
    r.insert("norm_a".into(), split.a.norm().into());
    r.insert("norm_b".into(), split.b.norm().into());
    match period {
        Period::Closed {
            period,
            fundamental,
            harmonics,
            ..
        } => {
            let curve = geodesic_curve(&c.tangent);
            let residual = curve.evaluate_mat(period).dist(c.tangent.base().as_mat());
            let closed = residual <= CLOSURE_TOL;
            let min_b = harmonics.iter().min().map(|&h| h as f64 * fundamental);
            r.insert("closed".into(), closed.into());
            r.insert(
                "length".into(),
                if closed { Value::Float(period) } else { Value::Missing },
            );
            r.insert("closure_residual".into(), residual.into());
            r.insert("min_frequency".into(), min_b.into());
            r.insert("frequencies".into(), harmonics.len().into());
        }
        Period::NotClosed => {
            r.insert("closed".into(), false.into());
            r.insert("length".into(), Value::Missing);
            r.insert("closure_residual".into(), Value::Missing);
            r.insert("min_frequency".into(), Value::Missing);
            r.insert("frequencies".into(), Value::Missing);
        }
    }
    Ok(r)
}

/// Loop lengths of structured closed families and of `samples` random
/// unit-speed geodesics. A detected period counts only if the ambient
/// curve returns to its start within `1e-8`.
pub fn closed_geodesic_search(
    n: usize,
    p: usize,
    samples: usize,
    seed: u64,
) -> Result<ExperimentReport, ExperimentError> {
    closed_geodesic_search_with(n, p, samples, seed, &Tolerances::default())
}

pub fn closed_geodesic_search_with(
    n: usize,
    p: usize,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<ExperimentReport, ExperimentError> {
    check_dims(n, p)?;
    if samples == 0 {
        return Err(ExperimentError::Domain("samples must be at least 1".into()));
    }
    if n == 1 {
        return Err(ExperimentError::Domain("St(1, 1) has no unit-speed geodesics".into()));
    }
    let fixed = structured(n, p);
    let offset = fixed.len();
    let mut rows: Vec<Record> = fixed
        .par_iter()
        .enumerate()
        .map(|(i, c)| examine(c, i, tol))
        .collect::<Result<_, _>>()?;
    let random: Vec<Record> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let u = random_point_with(n, p, &mut rng);
            let c = Candidate {
                family: "random".into(),
                structured: false,
                tangent: random_tangent_with(&u, 1.0, &mut rng),
            };
            examine(&c, offset + i, tol)
        })
        .collect::<Result<_, _>>()?;
    rows.extend(random);

    let mut rep = ExperimentReport::new("closed-geo-search", n, p, seed, samples);
    rep.parameters.insert("structured_families".into(), offset.into());
    rep.records = rows;
    rep.push_stat("length", "length");
    rep.push_stat("closure_residual", "closure_residual");

    let closed: Vec<&Record> = rep
        .records
        .iter()
        .filter(|r| r["closed"].as_bool() == Some(true))
        .collect();
    let min_len = closed
        .iter()
        .filter_map(|r| r["length"].as_f64())
        .fold(f64::INFINITY, f64::min);
    let worst_min_b = closed
        .iter()
        .filter_map(|r| r["min_frequency"].as_f64())
        .fold(0.0, f64::max);
    let random_closed = closed
        .iter()
        .filter(|r| r["structured"].as_bool() == Some(false))
        .count();
    rep.findings.insert("closed_count".into(), closed.len().into());
    rep.findings.insert("random_closed_count".into(), random_closed.into());
    rep.findings.insert(
        "min_length".into(),
        if min_len.is_finite() {
            Value::Float(min_len)
        } else {
            Value::Missing
        },
    );

    rep.push_verdict(
        "every closed geodesic has length >= 2 pi",
        min_len >= TAU - LENGTH_TOL,
        min_len,
        LENGTH_TOL,
    );
    rep.push_verdict(
        "every closed geodesic has a frequency <= 1",
        worst_min_b <= 1.0 + 1e-9,
        worst_min_b,
        1e-9,
    );
    if min_len.is_finite() {
        let bound = klingenberg_bound(1.0, min_len)?;
        rep.push_verdict(
            "klingenberg bound with C = 1 equals pi",
            (bound - PI).abs() <= 1e-9,
            bound,
            1e-9,
        );
    }
    if let Some(r) = rep.records.iter().find(|r| r["family"] == Value::from("b-diag-2-1")) {
        let len = r["length"].as_f64().unwrap_or(f64::NAN);
        let target = TAU * 5f64.sqrt();
        rep.push_verdict(
            "b-diag-2-1 closes with length 2 pi sqrt(5)",
            (len - target).abs() <= 1e-9 * target,
            len,
            1e-9 * target,
        );
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn st42_example_returns_at_two_pi() {
        let c = make_closed_geodesic(4, 2).unwrap();
        assert_eq!(c.period, TAU);
        let curve = geodesic_curve(&c.tangent);
        assert!(curve.evaluate_mat(TAU).dist(c.tangent.base().as_mat()) < 1e-10);
        assert!((measured_length(&curve, 0.0, TAU, 64) - TAU).abs() < 1e-12);
    }

    #[test]
    fn sphere_and_square_cases() {
        let c = make_closed_geodesic(3, 1).unwrap();
        assert!(c.tangent.split().a.norm() == 0.0);
        let c = make_closed_geodesic(3, 3).unwrap();
        let curve = geodesic_curve(&c.tangent);
        assert!((c.period - TAU * 2f64.sqrt()).abs() < 1e-15);
        assert!(curve.evaluate_mat(c.period).dist(c.tangent.base().as_mat()) < 1e-10);
        assert!(matches!(make_closed_geodesic(1, 1), Err(ExperimentError::Domain(_))));
    }

    #[test]
    fn small_search() {
        let rep = closed_geodesic_search(5, 2, 20, 3).unwrap();
        assert!(rep.passed(), "{:?}", rep.verdicts);
        assert!(rep.verdict("b-diag-2-1 closes with length 2 pi sqrt(5)").is_some());
        let circle = &rep.records[0];
        assert!((circle["length"].as_f64().unwrap() - TAU).abs() < 1e-12);
    }
}
