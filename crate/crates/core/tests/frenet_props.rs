use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use proptest::prelude::*;
use stiefel_core::frenet::{
    curvature_profile, frenet_from_derivatives, geodesic_frenet_curvatures, geodesic_loop_length, minimal_period,
    normal_form, Component, NormalForm, Period, ProfileOptions,
};
use stiefel_core::stiefel::{geodesic_curve, kappa1_squared, random_point, random_tangent};
use stiefel_core::{Mat, Tolerances};

fn dims() -> impl Strategy<Value = (usize, usize)> {
    prop::sample::select(vec![(3usize, 1usize), (3, 2), (4, 2), (5, 2), (5, 3), (4, 4)])
}

fn planar(freqs: &[f64]) -> NormalForm {
    let dim = 2 * freqs.len();
    let components = freqs
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let mut e1 = vec![0.0; dim];
            let mut e2 = vec![0.0; dim];
            e1[2 * i] = 1.0;
            e2[2 * i + 1] = 1.0;
            Component {
                amplitude: 1.0,
                frequency: b,
                plane: (e1, e2),
            }
        })
        .collect();
    NormalForm {
        components,
        dc_offset: vec![0.0; dim],
        source_dim: dim,
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frame_factorizes_random_derivatives(n in 2usize..7, m in 1usize..4, seed in any::<u64>()) {
        let m = m.min(n);
        let u = random_point(n, m, seed);
        let d = u.as_mat() * &Mat::from_fn(m, m, |i, j| if j >= i { 1.0 + (i + 2 * j) as f64 * 0.1 } else { 0.0 });
        let f = frenet_from_derivatives(&d).unwrap();
        prop_assert_eq!(f.effective_dim, m);
        prop_assert!((&f.frame * &f.r).dist(&d) <= 1e-12);
        prop_assert!(f.frame.orthonormality_defect() <= 1e-12);
        // R agrees with the R factor of an independent QR up to column signs
        let theirs = DMatrix::from_row_slice(n, m, d.as_slice()).qr().r();
        for i in 0..m {
            prop_assert!((f.r[(i, i)].abs() - theirs[(i, i)].abs()).abs() <= 1e-12);
        }
    }

    #[test]
    fn analytic_kappa1_matches_trace_formula((n, p) in dims(), seed in any::<u64>()) {
        let u = random_point(n, p, seed);
        let split = random_tangent(&u, seed ^ 11, 1.0).split().clone();
        let f = geodesic_frenet_curvatures(&split.a, &split.b, 3.min(2 * p * p)).unwrap();
        let k2 = kappa1_squared(&split.a, &split.b).unwrap();
        prop_assert!((f.curvatures[0] - k2.sqrt()).abs() <= 1e-10);
        // non-final curvatures of the distinguished frame are positive
        for k in &f.curvatures {
            prop_assert!(*k > 0.0);
        }
    }

    #[test]
    fn normal_form_identities((n, p) in dims(), seed in any::<u64>(), norm in 0.2..2.0f64) {
        let u = random_point(n, p, seed);
        let d = random_tangent(&u, seed ^ 12, norm);
        let split = d.split();
        let nf = normal_form(&split.a, &split.b).unwrap();
        prop_assert!((nf.speed_squared() - norm * norm).abs() <= 1e-10);
        let unit = d.scaled(1.0 / norm);
        let us = unit.split();
        let k2 = kappa1_squared(&us.a, &us.b).unwrap();
        prop_assert!((nf.acceleration_squared() / norm.powi(4) - k2).abs() <= 1e-9);
        let f = nf.frequencies();
        prop_assert!(f.windows(2).all(|w| w[0] > w[1]));
        for c in &nf.components {
            let (e1, e2) = &c.plane;
            let d12: f64 = e1.iter().zip(e2).map(|(a, b)| a * b).sum();
            prop_assert!(d12.abs() <= 1e-9);
        }
    }

    #[test]
    fn normal_form_reproduces_coordinates((n, p) in dims(), seed in any::<u64>(), t in -10.0..10.0f64) {
        let u = random_point(n, p, seed);
        let d = random_tangent(&u, seed ^ 13, 1.0);
        let split = d.split();
        let nf = normal_form(&split.a, &split.b).unwrap();
        let curve = geodesic_curve(&d);
        let direct = curve.coordinates(t).vectorize();
        let err: f64 = nf.evaluate(t).iter().zip(&direct).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-9, "{}", err);
    }

    #[test]
    fn integer_frequency_sets(ks in prop::collection::vec(1u64..12, 1..4), base in 0.2..3.0f64) {
        let freqs: Vec<f64> = ks.iter().map(|&k| k as f64 * base).collect();
        let g = ks.iter().fold(0, |acc, &k| gcd(acc, k));
        let expected = TAU / (g as f64 * base);
        match minimal_period(&planar(&freqs)).unwrap() {
            Period::Closed { period, .. } => prop_assert!((period - expected).abs() <= 1e-9 * expected),
            Period::NotClosed => prop_assert!(false, "rational set reported open"),
        }
    }

    #[test]
    fn closed_geodesics_have_a_slow_frequency(ratios in prop::collection::vec(1u64..6, 1..3)) {
        // A = 0, B diagonal with integer entries: closed by construction
        let p = ratios.len();
        let s = ratios.iter().map(|&r| (r * r) as f64).sum::<f64>().sqrt();
        let b = Mat::from_diag(&ratios.iter().map(|&r| r as f64 / s).collect::<Vec<_>>());
        let period = geodesic_loop_length(&Mat::zeros(p, p), &b, &Tolerances::default()).unwrap();
        let len = period.value().unwrap();
        prop_assert!(len >= TAU - 1e-6);
        let nf = normal_form(&Mat::zeros(p, p), &b).unwrap();
        prop_assert!(nf.frequencies().iter().any(|&f| f <= 1.0 + 1e-9));
    }
}

#[test]
fn irrational_pair_is_open() {
    assert_eq!(minimal_period(&planar(&[2f64.sqrt(), 1.0])).unwrap(), Period::NotClosed);
    assert_eq!(minimal_period(&planar(&[PI, 1.0])).unwrap(), Period::NotClosed);
}

#[test]
fn random_geodesics_are_open() {
    let mut closed = 0;
    for seed in 0..40 {
        let u = random_point(4, 2, seed);
        let split = random_tangent(&u, seed + 100, 1.0).split().clone();
        if geodesic_loop_length(&split.a, &split.b, &Tolerances::default())
            .unwrap()
            .is_closed()
        {
            closed += 1;
        }
    }
    assert_eq!(closed, 0);
}

#[test]
fn profile_matches_analytic_at_zero() {
    let u = random_point(5, 3, 21);
    let d = random_tangent(&u, 22, 1.0);
    let split = d.split();
    let analytic = geodesic_frenet_curvatures(&split.a, &split.b, 4).unwrap();
    let curve = geodesic_curve(&d);
    let grid: Vec<f64> = (0..25).map(|k| k as f64 * TAU / 24.0).collect();
    let prof = curvature_profile(|t| curve.evaluate_mat(t).vectorize(), &grid, &ProfileOptions::default()).unwrap();
    for j in 1..=3 {
        assert!((prof.curvatures[0][j - 1] - analytic.curvatures[j - 1]).abs() <= 1e-5);
        assert!(prof.max_deviation(j) <= 1e-4);
    }
    assert!(prof.max_frame_defect() <= 1e-10);
}

#[test]
fn profile_of_the_circle_geodesic() {
    let mut d = Mat::zeros(4, 2);
    d[(2, 0)] = 1.0;
    let u = stiefel_core::stiefel::StiefelPoint::standard(4, 2);
    let t = stiefel_core::stiefel::TangentVector::new(u, d).unwrap();
    let curve = geodesic_curve(&t);
    let grid: Vec<f64> = (0..40).map(|k| k as f64 * 0.16).collect();
    let opts = ProfileOptions {
        order: 3,
        ..Default::default()
    };
    let prof = curvature_profile(|s| curve.evaluate_mat(s).vectorize(), &grid, &opts).unwrap();
    for (row, dim) in prof.curvatures.iter().zip(&prof.effective_dim) {
        assert_eq!(*dim, 2);
        assert!((row[0] - 1.0).abs() <= 1e-4);
        assert_eq!(row[1], 0.0);
    }
}
