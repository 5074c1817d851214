use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use super::{check_dims, make_closed_geodesic, ExperimentError, ExperimentReport, Record, Value};
use crate::matcore::Mat;
use crate::stiefel::{
    random_point_with, random_tangent_with, sample_rng, stiefel_log, LogOptions, StiefelError, StiefelPoint,
    TangentVector,
};

/// `min(pi / sqrt(C), l / 2)` for sectional curvature at most `C` and
/// shortest closed geodesic length `l`.
pub fn klingenberg_bound(c: f64, l: f64) -> Result<f64, ExperimentError> {
    if !(c.is_finite() && c > 0.0 && l.is_finite() && l > 0.0) {
        return Err(ExperimentError::Domain(format!(
            "curvature bound and loop length must be positive, got C = {c}, l = {l}"
        )));
    }
    Ok((PI / c.sqrt()).min(0.5 * l))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    /// Perturbed starts of the logarithm in addition to the canonical one.
    pub starts: usize,
    /// Perturbation radius as a fraction of the probe radius.
    pub perturbation_factor: f64,
    /// Maximal `|Log - r D|` for a successful recovery.
    pub recovery_tol: f64,
    /// Radii at most `hard_below * pi` must recover uniquely.
    pub hard_below: f64,
    /// Radii at least `witness_above * pi` must show a witness on the circle family.
    pub witness_above: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            starts: 20,
            perturbation_factor: 0.3,
            recovery_tol: 1e-7,
            hard_below: 0.95,
            witness_above: 1.05,
        }
    }
}

struct Probe {
    status: &'static str,
    error: Option<f64>,
    witnesses: usize,
    solutions: usize,
    iterations: Option<usize>,
}

fn probe(
    u: &StiefelPoint,
    delta: &Mat,
    radius: f64,
    log_seed: u64,
    opts: &ProbeOptions,
) -> Result<Probe, ExperimentError> {
    let v = TangentVector::new(u.clone(), delta.clone())?.exp();
    let log_opts = LogOptions {
        restarts: opts.starts,
        perturbation: Some(opts.perturbation_factor * radius),
        seed: log_seed,
        ..Default::default()
    };
    let other = |s: &Mat| s.dist(delta) > log_opts.distinct_tol && s.norm() <= radius + log_opts.tol;
    Ok(match stiefel_log(u, &v, &log_opts) {
        Ok(out) => {
            let err = out.tangent.delta().dist(delta);
            let witnesses = out.solutions.iter().filter(|s| other(s)).count();
            let status = if witnesses > 0 {
                "witness"
            } else if err <= opts.recovery_tol {
                "unique"
            } else {
                "missed"
            };
            Probe {
                status,
                error: Some(err),
                witnesses,
                solutions: out.solutions.len(),
                iterations: Some(out.iterations),
            }
        }
        Err(StiefelError::Ambiguous { solutions }) => Probe {
            status: "ambiguous",
            error: solutions.iter().map(|s| s.dist(delta)).reduce(f64::min),
            witnesses: solutions.iter().filter(|s| other(s)).count(),
            solutions: solutions.len(),
            iterations: None,
        },
        Err(StiefelError::NoConvergence { .. }) => Probe {
            status: "no_convergence",
            error: None,
            witnesses: 0,
            solutions: 0,
            iterations: None,
        },
        Err(e) => return Err(e.into()),
    })
}

fn record(radius_index: usize, radius: f64, sample: Value, family: &str, pr: &Probe) -> Record {
    let mut r = Record::new();
    r.insert("radius_index".into(), radius_index.into());
    r.insert("radius".into(), radius.into());
    r.insert("sample".into(), sample);
    r.insert("family".into(), family.into());
    r.insert("status".into(), pr.status.into());
    r.insert("recovery_error".into(), pr.error.into());
    r.insert("witnesses".into(), pr.witnesses.into());
    r.insert("solutions".into(), pr.solutions.into());
    r.insert("iterations".into(), pr.iterations.map_or(Value::Missing, Value::from));
    r
}

/// Log-exp roundtrips at each radius from random unit directions, plus the
/// closed circle family for radii near and beyond half its period.
///
/// Radii up to `hard_below * pi` must recover uniquely; radii from
/// `witness_above * pi` must produce a shorter or equally short competitor
/// on the circle family. Radii in between are recorded without a verdict.
pub fn injectivity_probe(
    n: usize,
    p: usize,
    radii: &[f64],
    samples: usize,
    seed: u64,
    opts: &ProbeOptions,
) -> Result<ExperimentReport, ExperimentError> {
    check_dims(n, p)?;
    if n == 1 {
        return Err(ExperimentError::Domain("St(1, 1) has no unit-speed geodesics".into()));
    }
    if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(ExperimentError::Domain(format!(
            "probe radii must be non-negative, got {r}"
        )));
    }
    let circle = make_closed_geodesic(n, p)?;
    let half_period = 0.5 * circle.period;
    let tasks: Vec<(usize, usize)> = (0..radii.len())
        .flat_map(|ri| (0..samples).map(move |i| (ri, i)))
        .collect();
    let random: Vec<Record> = tasks
        .par_iter()
        .map(|&(ri, i)| {
            let r = radii[ri];
            let mut rng = sample_rng(seed, ((ri as u64) << 32) | i as u64);
            let u = random_point_with(n, p, &mut rng);
            let dir = random_tangent_with(&u, 1.0, &mut rng);
            let log_seed: u64 = rng.random();
            let pr = probe(&u, &dir.delta().scale(r), r, log_seed, opts)?;
            Ok(record(ri, r, i.into(), "random", &pr))
        })
        .collect::<Result<_, ExperimentError>>()?;
    let circle_rows: Vec<Option<Record>> = radii
        .par_iter()
        .enumerate()
        .map(|(ri, &r)| {
            if r < opts.hard_below * half_period {
                return Ok(None);
            }
            let delta = circle.tangent.delta().scale(r);
            let pr = probe(circle.tangent.base(), &delta, r, seed ^ ri as u64, opts)?;
            Ok(Some(record(ri, r, Value::Missing, "circle", &pr)))
        })
        .collect::<Result<_, ExperimentError>>()?;

    let mut rep = ExperimentReport::new("injectivity-probe", n, p, seed, samples);
    rep.parameters.insert(
        "radii".into(),
        Value::Text(radii.iter().map(|r| format!("{r}")).collect::<Vec<_>>().join(";")),
    );
    rep.parameters.insert("starts".into(), opts.starts.into());
    rep.parameters
        .insert("perturbation_factor".into(), opts.perturbation_factor.into());
    rep.parameters.insert("circle_half_period".into(), half_period.into());
    rep.records = random;
    rep.records.extend(circle_rows.into_iter().flatten());
    rep.push_stat("recovery_error", "recovery_error");

    for (ri, &r) in radii.iter().enumerate() {
        let rows: Vec<&Record> = rep
            .records
            .iter()
            .filter(|x| x["radius_index"] == Value::from(ri) && x["family"] == Value::from("random"))
            .collect();
        let unique = rows.iter().filter(|x| x["status"] == Value::from("unique")).count();
        let worst = rows
            .iter()
            .filter_map(|x| x["recovery_error"].as_f64())
            .fold(0.0, f64::max);
        rep.findings.insert(
            format!("r{ri}_unique_fraction"),
            (unique as f64 / rows.len().max(1) as f64).into(),
        );
        rep.findings.insert(format!("r{ri}_max_recovery_error"), worst.into());
        if r <= opts.hard_below * PI && samples > 0 {
            rep.push_verdict(
                format!("r = {r}: unique recovery"),
                unique == rows.len(),
                unique as f64 / rows.len() as f64,
                opts.recovery_tol,
            );
        }
        let circle_row = rep
            .records
            .iter()
            .find(|x| x["radius_index"] == Value::from(ri) && x["family"] == Value::from("circle"));
        if let Some(c) = circle_row {
            let w = c["witnesses"].as_f64().unwrap_or(0.0);
            rep.findings.insert(format!("r{ri}_circle_witnesses"), w.into());
            if r >= opts.witness_above * half_period {
                rep.push_verdict(format!("r = {r}: circle family witness"), w > 0.0, w, 0.0);
            }
        }
    }
    Ok(rep)
}
