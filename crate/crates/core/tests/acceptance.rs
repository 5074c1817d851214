//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use stiefel_core::experiments::{
    closed_geodesic_search, curvature_bound_experiment, injectivity_probe, klingenberg_bound, make_closed_geodesic,
    measured_length, ExperimentReport, ProbeOptions, Value,
};
use stiefel_core::frenet::{curvature_profile, geodesic_frenet_curvatures, normal_form, ProfileOptions};
use stiefel_core::matcore::{expm, kron_sum};
use stiefel_core::stiefel::{
    generator, geodesic_curve, geodesic_derivative_coeffs, kappa1_squared, random_point_with, random_tangent_with,
    sample_rng,
};
use stiefel_core::Mat;

struct Outcome {
    pass: bool,
    detail: String,
}

fn linspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let c = make_closed_geodesic(4, 2).unwrap();
    let curve = geodesic_curve(&c.tangent);
    let closure = curve.evaluate_mat(TAU).dist(c.tangent.base().as_mat());
    let length_err = (measured_length(&curve, 0.0, TAU, 400) - TAU).abs();
    let split = c.tangent.split();
    let k1 = geodesic_frenet_curvatures(&split.a, &split.b, 2).unwrap().curvatures[0];
    let k1_err = (k1 - 1.0).abs();
    let elapsed = start.elapsed();
    Outcome {
        pass: closure <= 1e-10 && length_err <= 1e-9 && k1_err <= 1e-10 && within(elapsed, 1.0),
        detail: format!(
            "closure {closure:.2e}, length error {length_err:.2e}, kappa1 error {k1_err:.2e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, p) in [(3, 2), (4, 2), (5, 3), (4, 4)] {
        let start = Instant::now();
        let rep = curvature_bound_experiment(n, p, 10_000, 42).unwrap();
        let elapsed = start.elapsed();
        let max = rep.findings["max_kappa1_sq"].as_f64().unwrap();
        let diff = rep.summary["abs_diff"].max;
        let ok = max <= 1.0 + 1e-10 && diff <= 1e-9 && within(elapsed, 30.0);
        pass &= ok;
        parts.push(format!(
            "St({n},{p}) max {max:.12} diff {diff:.1e} {:.1} s",
            elapsed.as_secs_f64()
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let grid = linspace(0.0, TAU, 200);
    let opts = ProfileOptions::default();
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        let mut rng = sample_rng(303, i);
        let u = random_point_with(5, 3, &mut rng);
        let d = random_tangent_with(&u, 1.0, &mut rng);
        let curve = geodesic_curve(&d);
        let prof = curvature_profile(|t| curve.evaluate_mat(t).vectorize(), &grid, &opts).unwrap();
        for j in 1..=3 {
            worst = worst.max(prof.max_deviation(j));
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-4 && within(elapsed, 120.0),
        detail: format!(
            "max variation of kappa_1..3 over 50 geodesics {worst:.2e}, {:.1} s",
            elapsed.as_secs_f64()
        ),
    }
}

/// `|gamma^(j)(t)|^2` in frame coordinates from the vectorized flow
/// `G^j exp(tG) vec(I_p; 0)`, independent of the block recursion.
fn criterion_4() -> Outcome {
    let dims = [(3, 1), (3, 2), (4, 2), (5, 3), (4, 4)];
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let (n, p) = dims[i as usize % dims.len()];
        let mut rng = sample_rng(404, i);
        let u = random_point_with(n, p, &mut rng);
        let d = random_tangent_with(&u, 1.0, &mut rng);
        let split = d.split();
        let coeffs = geodesic_derivative_coeffs(&split.a, &split.b, 6).unwrap();
        let g = kron_sum(&split.a, &generator(&split.a, &split.b)).unwrap();
        let c0 = Mat::eye_rect(2 * p, p).vectorize();
        for _ in 0..5 {
            let t: f64 = rng.random_range(0.0..TAU);
            let mut v = expm(&g.scale(t)).unwrap().mul_vec(&c0);
            for j in 1..=6 {
                v = g.mul_vec(&v);
                let direct: f64 = v.iter().map(|x| x * x).sum();
                let formula = coeffs.norm_squared(j);
                worst = worst.max((direct - formula).abs() / formula.max(1.0));
            }
        }
    }
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("max relative mismatch for j <= 6 over 100 geodesics x 5 times {worst:.2e}"),
    }
}

fn closed_search_ok(rep: &ExperimentReport) -> (bool, String) {
    let min_len = rep.findings["min_length"].as_f64().unwrap_or(f64::INFINITY);
    let row = rep.records.iter().find(|r| r["family"] == Value::from("b-diag-2-1"));
    let (len, res) = match row {
        Some(r) => (
            r["length"].as_f64().unwrap_or(f64::NAN),
            r["closure_residual"].as_f64().unwrap_or(f64::NAN),
        ),
        None => (f64::NAN, f64::NAN),
    };
    let target = TAU * 5f64.sqrt();
    let ok = min_len >= TAU - 1e-6 && (len - target).abs() <= 1e-9 * target && res <= 1e-8;
    (
        ok,
        format!(
            "St({},{}) shortest {min_len:.12}, diag(2,1)/sqrt5 length {len:.12} residual {res:.1e}, {} random closed",
            rep.n, rep.p, rep.findings["random_closed_count"]
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, p) in [(4, 2), (5, 3)] {
        let rep = closed_geodesic_search(n, p, 1000, 55).unwrap();
        let (ok, msg) = closed_search_ok(&rep);
        pass &= ok;
        parts.push(msg);
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let bound = klingenberg_bound(1.0, TAU).unwrap();
    let a_ok = bound == PI;
    let radii = [0.25 * PI, 0.5 * PI, 0.75 * PI, 0.9 * PI, PI];
    let rep = injectivity_probe(4, 2, &radii, 200, 66, &ProbeOptions::default()).unwrap();
    let mut b_ok = true;
    let mut parts = vec![format!("klingenberg(1, 2pi) = {bound}")];
    for (ri, r) in radii.iter().enumerate().take(4) {
        let rows: Vec<_> = rep
            .records
            .iter()
            .filter(|x| x["radius_index"] == Value::from(ri) && x["family"] == Value::from("random"))
            .collect();
        let unique = rows.iter().filter(|x| x["status"] == Value::from("unique")).count();
        let worst = rows
            .iter()
            .map(|x| x["recovery_error"].as_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        b_ok &= unique == 200 && worst <= 1e-7;
        parts.push(format!(
            "r = {:.2}pi {unique}/200 unique, max error {worst:.1e}",
            r / PI
        ));
    }
    let circle = rep
        .records
        .iter()
        .find(|x| x["radius_index"] == Value::from(4usize) && x["family"] == Value::from("circle"));
    let witnesses = circle.and_then(|c| c["witnesses"].as_f64()).unwrap_or(0.0);
    let c_ok = witnesses > 0.0;
    parts.push(format!("circle witnesses at r = pi: {witnesses}"));
    let elapsed = start.elapsed();
    parts.push(format!("{:.1} s", elapsed.as_secs_f64()));
    Outcome {
        pass: a_ok && b_ok && c_ok && within(elapsed, 300.0),
        detail: parts.join(", "),
    }
}

fn criterion_7() -> Outcome {
    let (mut speed_err, mut curv_err, mut recon_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..50u64 {
        let mut rng = sample_rng(707, i);
        let u = random_point_with(4, 2, &mut rng);
        let d = random_tangent_with(&u, 1.0, &mut rng);
        let split = d.split();
        let nf = normal_form(&split.a, &split.b).unwrap();
        speed_err = speed_err.max((nf.speed_squared() - d.norm().powi(2)).abs());
        let k2 = kappa1_squared(&split.a, &split.b).unwrap();
        curv_err = curv_err.max((nf.acceleration_squared() - k2).abs());
        let curve = geodesic_curve(&d);
        let ts: Vec<f64> = (0..50).map(|_| rng.random_range(0.0..TAU)).collect();
        let model: Vec<Vec<f64>> = ts.iter().map(|&t| nf.evaluate(t)).collect();
        let actual: Vec<Vec<f64>> = ts.iter().map(|&t| curve.evaluate_mat(t).vectorize()).collect();
        for a in 0..ts.len() {
            for b in (a + 1)..ts.len() {
                let e = (dist(&model[a], &model[b]) - dist(&actual[a], &actual[b])).abs();
                recon_err = recon_err.max(e);
            }
        }
    }
    Outcome {
        pass: speed_err <= 1e-9 && curv_err <= 1e-9 && recon_err <= 1e-9,
        detail: format!("speed {speed_err:.1e}, curvature {curv_err:.1e}, pairwise distances {recon_err:.1e}"),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("closed geodesic on St(4,2)", criterion_1),
        ("curvature bound", criterion_2),
        ("constant Frenet curvatures", criterion_3),
        ("constant derivative norms", criterion_4),
        ("shortest closed geodesic", criterion_5),
        ("injectivity radius", criterion_6),
        ("normal form fidelity", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        if !out.pass {
            failed += 1;
        }
        println!(
            "criterion {} ({name}): {} | {}",
            i + 1,
            if out.pass { "PASS" } else { "FAIL" },
            out.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
