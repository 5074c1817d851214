use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{project_tangent, StiefelPoint, TangentVector};
use crate::matcore::{thin_qr, Mat};

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    Mat::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Orthonormal factor of an `n x p` standard Gaussian matrix.
pub fn random_point_with<R: Rng + ?Sized>(n: usize, p: usize, rng: &mut R) -> StiefelPoint {
    assert!(n >= p && p >= 1, "St(n, p) needs n >= p >= 1");
    let qr = thin_qr(&gaussian(n, p, rng)).expect("n >= p");
    StiefelPoint::from_unchecked(qr.q)
}

pub fn random_point(n: usize, p: usize, seed: u64) -> StiefelPoint {
    random_point_with(n, p, &mut sample_rng(seed, 0))
}

/// Tangent projection of a Gaussian matrix, rescaled to `norm`.
pub fn random_tangent_with<R: Rng + ?Sized>(u: &StiefelPoint, norm: f64, rng: &mut R) -> TangentVector {
    let w = gaussian(u.n(), u.p(), rng);
    let t = project_tangent(u, &w).expect("shapes agree");
    let current = t.norm();
    if current == 0.0 {
        return t;
    }
    t.scaled(norm / current)
}

pub fn random_tangent(u: &StiefelPoint, seed: u64, norm: f64) -> TangentVector {
    random_tangent_with(u, norm, &mut sample_rng(seed, 1))
}
