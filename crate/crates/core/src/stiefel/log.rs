//! Riemannian logarithm by geodesic shooting.
//!
//! Tangent vectors at `U` are parameterized by coordinates in a fixed
//! orthonormal basis of `T_U St(n, p)`. Damped Gauss-Newton drives the
//! residual `Exp_U(D(x)) - V` to zero, with a central-difference Jacobian.

use rand::Rng;

use super::{geodesic_curve, project_tangent, sample_rng, StiefelError, StiefelPoint, TangentVector};
use crate::matcore::{symmetric_eigen, thin_qr, Mat};
use crate::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct LogOptions {
    pub max_iter: usize,
    /// Step halvings allowed per iteration before giving up.
    pub max_halvings: usize,
    /// Accepted residual `|Exp_U(D) - V|`.
    pub tol: f64,
    /// Perturbed starts in addition to the canonical one.
    pub restarts: usize,
    /// Norm of the random perturbation of the restarts. `None` uses
    /// `0.3 * max(|D_0|, |V - U|)` with `D_0` the canonical start.
    pub perturbation: Option<f64>,
    pub seed: u64,
    /// Solutions closer than this are the same solution; norms closer than
    /// this count as equal when checking for ambiguity.
    pub distinct_tol: f64,
}

impl Default for LogOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            max_halvings: 30,
            tol: Tolerances::default().shoot,
            restarts: 0,
            perturbation: None,
            seed: 0,
            distinct_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShootResult {
    pub delta: Mat,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct LogOutcome {
    pub tangent: TangentVector,
    pub iterations: usize,
    pub residual: f64,
    /// Distinct converged solutions, sorted by norm.
    pub solutions: Vec<Mat>,
    pub starts: usize,
    pub converged_starts: usize,
}

/// Orthonormal basis of `T_U St(n, p)` in the Frobenius inner product:
/// `U (E_ij - E_ji) / sqrt(2)` for `i < j`, then `U_perp E_kl`.
pub fn tangent_basis(u: &StiefelPoint) -> Vec<Mat> {
    let (n, p) = u.as_mat().shape();
    let um = u.as_mat();
    let perp = u.complement();
    let mut basis = Vec::with_capacity(n * p - p * (p + 1) / 2);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..p {
        for j in (i + 1)..p {
            let mut e = Mat::zeros(p, p);
            e[(i, j)] = s;
            e[(j, i)] = -s;
            basis.push(um * &e);
        }
    }
    for k in 0..(n - p) {
        for l in 0..p {
            basis.push(Mat::from_fn(n, p, |r, c| if c == l { perp[(r, k)] } else { 0.0 }));
        }
    }
    basis
}

struct Chart<'a> {
    base: &'a StiefelPoint,
    target: &'a Mat,
    basis: Vec<Mat>,
}

impl Chart<'_> {
    fn delta(&self, x: &[f64]) -> Mat {
        let (n, p) = self.base.as_mat().shape();
        let mut d = Mat::zeros(n, p);
        for (xi, e) in x.iter().zip(&self.basis) {
            if *xi != 0.0 {
                d += &e.scale(*xi);
            }
        }
        d
    }

    fn coords(&self, d: &Mat) -> Vec<f64> {
        self.basis.iter().map(|e| e.inner(d)).collect()
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let t = TangentVector::from_parts(self.base.clone(), self.delta(x));
        let end = geodesic_curve(&t).evaluate_mat(1.0);
        (&end - self.target).vectorize()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Single Gauss-Newton run from `initial`.
pub fn shoot(
    u: &StiefelPoint,
    v: &StiefelPoint,
    initial: &Mat,
    opts: &LogOptions,
) -> Result<ShootResult, StiefelError> {
    if u.as_mat().shape() != v.as_mat().shape() {
        return Err(StiefelError::Shape {
            expected: u.as_mat().shape(),
            got: v.as_mat().shape(),
        });
    }
    let chart = Chart {
        base: u,
        target: v.as_mat(),
        basis: tangent_basis(u),
    };
    let dim = chart.basis.len();
    let mut x = chart.coords(initial);
    let mut r = chart.residual(&x);
    let mut res = norm(&r);
    let mut iterations = 0;
    if dim == 0 {
        // St(1, 1) is a single point
        return finish(&chart, x, res, 0, opts);
    }

    while iterations < opts.max_iter && res > 1e-3 * opts.tol {
        iterations += 1;
        let h = 1e-6 * (1.0 + norm(&x));
        let rows = r.len();
        let mut jac = Mat::zeros(rows, dim);
        for k in 0..dim {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let rp = chart.residual(&xp);
            let rm = chart.residual(&xm);
            for i in 0..rows {
                jac[(i, k)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let step = gauss_newton_step(&jac, &r);

        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + scale * b).collect();
            let rt = chart.residual(&trial);
            let nt = norm(&rt);
            if nt < res {
                accepted = Some((trial, rt, nt));
                break;
            }
            scale *= 0.5;
        }
        match accepted {
            Some((xt, rt, nt)) => {
                let moved = scale * norm(&step);
                x = xt;
                r = rt;
                res = nt;
                if moved <= 1e-15 * (1.0 + norm(&x)) {
                    break;
                }
            }
            None => break,
        }
    }
    finish(&chart, x, res, iterations, opts)
}

fn finish(
    chart: &Chart<'_>,
    x: Vec<f64>,
    res: f64,
    iterations: usize,
    opts: &LogOptions,
) -> Result<ShootResult, StiefelError> {
    let delta = chart.delta(&x);
    if res <= opts.tol {
        Ok(ShootResult {
            delta,
            iterations,
            residual: res,
        })
    } else {
        Err(StiefelError::NoConvergence {
            iterations,
            best_residual: res,
            best: delta,
        })
    }
}

/// Least-squares solution of `J s = -r`. Falls back to a lightly
/// regularized normal equation when `J` is numerically rank deficient.
fn gauss_newton_step(jac: &Mat, r: &[f64]) -> Vec<f64> {
    let dim = jac.cols();
    let neg_r: Vec<f64> = r.iter().map(|x| -x).collect();
    let qr = thin_qr(jac).expect("residual dimension exceeds tangent dimension");
    let diag_max = (0..dim).map(|i| qr.r[(i, i)]).fold(0.0, f64::max);
    let well_posed = diag_max > 0.0 && (0..dim).all(|i| qr.r[(i, i)] > 1e-10 * diag_max);
    if well_posed {
        let rhs = qr.q.transpose().mul_vec(&neg_r);
        let mut s = vec![0.0; dim];
        for i in (0..dim).rev() {
            let mut acc = rhs[i];
            for k in (i + 1)..dim {
                acc -= qr.r[(i, k)] * s[k];
            }
            s[i] = acc / qr.r[(i, i)];
        }
        return s;
    }
    // minimum-norm step through the eigen-decomposition of J^T J
    let jtj = jac.t_mul(jac);
    let rhs = jac.transpose().mul_vec(&neg_r);
    let eig = symmetric_eigen(&jtj).expect("J^T J is square");
    let top = eig.values.last().copied().unwrap_or(0.0);
    let mut s = vec![0.0; dim];
    for k in 0..dim {
        let lam = eig.values[k];
        if lam <= 1e-20 * top.max(f64::MIN_POSITIVE) {
            continue;
        }
        let vk = eig.vectors.column(k);
        let c: f64 = vk.iter().zip(&rhs).map(|(a, b)| a * b).sum::<f64>() / lam;
        for (si, vi) in s.iter_mut().zip(&vk) {
            *si += c * vi;
        }
    }
    s
}

/// Shooting logarithm `Log_U(V)`.
///
/// Starts from `project_tangent(U, V - U)` plus `opts.restarts` randomly
/// perturbed starts, keeps every converged solution, and returns the one of
/// smallest norm. Two distinct solutions of equal minimal norm yield
/// [`StiefelError::Ambiguous`].
pub fn stiefel_log(u: &StiefelPoint, v: &StiefelPoint, opts: &LogOptions) -> Result<LogOutcome, StiefelError> {
    if u.as_mat().shape() != v.as_mat().shape() {
        return Err(StiefelError::Shape {
            expected: u.as_mat().shape(),
            got: v.as_mat().shape(),
        });
    }
    let canonical = project_tangent(u, &(v.as_mat() - u.as_mat()))?;
    let mut starts = vec![canonical.delta().clone()];
    if opts.restarts > 0 {
        let radius = opts
            .perturbation
            .unwrap_or_else(|| 0.3 * canonical.norm().max(v.as_mat().dist(u.as_mat())));
        let mut rng = sample_rng(opts.seed, 0);
        for _ in 0..opts.restarts {
            let w = Mat::from_fn(u.n(), u.p(), |_, _| rng.sample(rand_distr::StandardNormal));
            let dir = project_tangent(u, &w)?;
            let nd = dir.norm();
            let bump = if nd > 0.0 {
                dir.delta().scale(radius / nd)
            } else {
                dir.delta().clone()
            };
            starts.push(canonical.delta() + &bump);
        }
    }

    let mut found: Vec<ShootResult> = Vec::new();
    let mut best_failure: Option<StiefelError> = None;
    for start in &starts {
        match shoot(u, v, start, opts) {
            Ok(sol) => {
                if !found.iter().any(|f| f.delta.dist(&sol.delta) <= opts.distinct_tol) {
                    found.push(sol);
                }
            }
            Err(e @ StiefelError::NoConvergence { .. }) => {
                let better = match (&best_failure, &e) {
                    (
                        Some(StiefelError::NoConvergence { best_residual: b, .. }),
                        StiefelError::NoConvergence { best_residual: c, .. },
                    ) => c < b,
                    _ => true,
                };
                if better {
                    best_failure = Some(e);
                }
            }
            Err(e) => return Err(e),
        }
    }
    let converged_starts = found.len();
    if found.is_empty() {
        return Err(best_failure.expect("at least one start was tried"));
    }
    found.sort_by(|a, b| a.delta.norm().total_cmp(&b.delta.norm()));
    let min_norm = found[0].delta.norm();
    let minimal: Vec<&ShootResult> = found
        .iter()
        .filter(|f| f.delta.norm() <= min_norm + opts.distinct_tol)
        .collect();
    if minimal.len() > 1 {
        return Err(StiefelError::Ambiguous {
            solutions: minimal.iter().map(|f| f.delta.clone()).collect(),
        });
    }
    let best = found[0].clone();
    Ok(LogOutcome {
        tangent: TangentVector::from_parts(u.clone(), best.delta),
        iterations: best.iterations,
        residual: best.residual,
        solutions: found.into_iter().map(|f| f.delta).collect(),
        starts: starts.len(),
        converged_starts,
    })
}
