//! Minimum-area enclosing ellipse of a finite point set.
//!
//! Khachiyan's dual ascent on the lifted points `q = (x, 1)` with Wolfe–Atwood
//! away steps. Points are whitened (centered and scaled to unit covariance)
//! before iterating; the weights are affine invariant, so the ellipse is then
//! read off the original coordinates.
//!
//! When many points are nearly co-elliptic the first-order steps crawl, so the
//! loop periodically runs a barrier Newton solve on the full dual. Its Hessian
//! is a diagonal plus a rank-six term, so each Newton step is linear in the
//! number of points.

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

use crate::conic::EllipseAffine;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, SymEigen2, Vec2};

pub const DEFAULT_EPS: f64 = 1e-7;
/// Smallest accepted ratio of singular values of the centered point matrix.
pub const COLLINEAR_RATIO: f64 = 1e-10;
const POLISH_EVERY: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct MveeSolution {
    pub ellipse: EllipseAffine,
    /// Nonnegative, sums to one; indexed like the input points.
    pub weights: Vec<f64>,
    pub gap: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MveeOptions {
    pub eps: f64,
    /// Overrides the default budget `100 · n · ln(1/eps)`.
    pub max_iter: Option<usize>,
}

impl Default for MveeOptions {
    fn default() -> Self {
        Self {
            eps: DEFAULT_EPS,
            max_iter: None,
        }
    }
}

impl MveeOptions {
    pub fn with_eps(eps: f64) -> Self {
        Self {
            eps,
            ..Self::default()
        }
    }

    fn budget(&self, n: usize) -> usize {
        self.max_iter
            .unwrap_or_else(|| (100.0 * n as f64 * (1.0 / self.eps).ln()).ceil() as usize)
    }
}

pub fn mvee_points(points: &[Vec2], eps: f64) -> Result<MveeSolution> {
    mvee_points_with(points, &MveeOptions::with_eps(eps))
}

pub fn mvee_points_with(points: &[Vec2], opts: &MveeOptions) -> Result<MveeSolution> {
    let n = points.len();
    if n < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: n });
    }
    let eps = opts.eps;
    if !(eps > 0.0 && eps <= 1e-3) {
        return Err(Error::InvalidInput(format!("eps must lie in (0, 1e-3], got {eps}")));
    }
    if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(Error::InvalidInput("non-finite point".into()));
    }

    let mean = points.iter().fold(Vec2::zeros(), |a, p| a + p) / n as f64;
    let cov = points
        .iter()
        .map(|p| (p - mean) * (p - mean).transpose())
        .fold(Mat2::zeros(), |a, m| a + m)
        / n as f64;
    let eig = SymEigen2::new(&linalg::symmetrize(&cov));
    if !(eig.min() > 0.0) || eig.min().sqrt() <= COLLINEAR_RATIO * eig.max().sqrt() {
        return Err(Error::CollinearInput);
    }
    let whiten = eig.map(|l| 1.0 / l.sqrt());
    let lifted: Vec<Vector3<f64>> = points
        .iter()
        .map(|p| {
            let y = whiten * (p - mean);
            Vector3::new(y[0], y[1], 1.0)
        })
        .collect();

    let budget = opts.budget(n);
    let mut u = vec![1.0 / n as f64; n];
    let mut omega = vec![0.0; n];
    let mut iterations = 0;
    loop {
        let m = moment(&lifted, &u);
        let m_inv = m.try_inverse().ok_or(Error::CollinearInput)?;
        for (w, q) in omega.iter_mut().zip(&lifted) {
            *w = q.dot(&(m_inv * q));
        }

        let (j, kappa_up) = argmax(&omega);
        if kappa_up <= 3.0 * (1.0 + eps) {
            break;
        }
        if iterations >= budget {
            return Err(Error::NoConvergence {
                iterations,
                gap: kappa_up / 3.0 - 1.0,
            });
        }
        iterations += 1;

        if iterations % POLISH_EVERY == 0 {
            if let Some(v) = polish(&lifted, &u, eps) {
                if moment(&lifted, &v).determinant() > m.determinant() {
                    u = v;
                    continue;
                }
            }
        }

        let (k, kappa_down) = omega
            .iter()
            .zip(&u)
            .enumerate()
            .filter(|(_, (_, &w))| w > 0.0)
            .map(|(i, (&o, _))| (i, o))
            .fold((usize::MAX, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });

        let up = kappa_up / 3.0 - 1.0;
        let down = 1.0 - kappa_down / 3.0;
        if up >= down || k == usize::MAX || u[k] >= 1.0 {
            let tau = (kappa_up - 3.0) / (3.0 * (kappa_up - 1.0));
            scale_weights(&mut u, 1.0 - tau);
            u[j] += tau;
        } else {
            let tau_min = -u[k] / (1.0 - u[k]);
            let tau = ((kappa_down - 3.0) / (3.0 * (kappa_down - 1.0))).max(tau_min);
            scale_weights(&mut u, 1.0 - tau);
            if tau == tau_min {
                u[k] = 0.0;
            } else {
                u[k] += tau;
            }
        }
    }

    let ellipse = ellipse_from_weights(points, &u)?.0;
    let mut sol = MveeSolution {
        ellipse,
        weights: u,
        gap: 0.0,
        iterations,
    };
    sol.gap = certify(&sol, points);
    Ok(sol)
}

fn moment(lifted: &[Vector3<f64>], u: &[f64]) -> Matrix3<f64> {
    lifted
        .iter()
        .zip(u)
        .fold(Matrix3::zeros(), |acc, (q, &w)| acc + w * q * q.transpose())
}

/// Barrier Newton ascent of `log det M(w) + μ Σ log w` over the simplex,
/// started near `u` and driving `μ` down until the dual slack it allows is
/// well below `eps`.
fn polish(lifted: &[Vector3<f64>], u: &[f64], eps: f64) -> Option<Vec<f64>> {
    let n = lifted.len();
    let mut w: Vec<f64> = u.iter().map(|&x| 0.99 * x + 0.01 / n as f64).collect();
    let objective = |w: &[f64], mu: f64| -> Option<f64> {
        let det = moment(lifted, w).determinant();
        (det > 0.0 && w.iter().all(|&x| x > 0.0)).then(|| det.ln() + mu * w.iter().map(|x| x.ln()).sum::<f64>())
    };
    let mu_end = 0.1 * eps / n as f64;
    let mut mu = (1e-2 / n as f64).max(mu_end);
    loop {
        for _ in 0..50 {
            // (qᵢᵀM⁻¹qⱼ)² = vᵢ·vⱼ with vᵢ the scaled upper triangle of rᵢrᵢᵀ,
            // rᵢ = Lᵀqᵢ and M⁻¹ = LLᵀ.
            let lt = moment(lifted, &w).try_inverse()?.cholesky()?.l().transpose();
            let v: Vec<Vector6<f64>> = lifted
                .iter()
                .map(|q| {
                    let r = lt * q;
                    let s2 = std::f64::consts::SQRT_2;
                    Vector6::new(r[0] * r[0], r[1] * r[1], r[2] * r[2], s2 * r[0] * r[1], s2 * r[0] * r[2], s2 * r[1] * r[2])
                })
                .collect();
            let g: Vec<f64> = v
                .iter()
                .zip(&w)
                .map(|(vi, wi)| vi[0] + vi[1] + vi[2] + mu / wi)
                .collect();
            let dinv: Vec<f64> = w.iter().map(|x| x * x / mu).collect();
            let small = v
                .iter()
                .zip(&dinv)
                .fold(Matrix6::identity(), |a, (vi, d)| a + *d * vi * vi.transpose())
                .cholesky()?;
            // Woodbury: (D + VVᵀ)⁻¹b = D⁻¹b − D⁻¹V(I + VᵀD⁻¹V)⁻¹VᵀD⁻¹b.
            let solve = |b: &dyn Fn(usize) -> f64| -> Vec<f64> {
                let t = (0..n).fold(Vector6::zeros(), |a, i| a + (dinv[i] * b(i)) * v[i]);
                let y = small.solve(&t);
                (0..n).map(|i| dinv[i] * (b(i) - v[i].dot(&y))).collect()
            };
            let hg = solve(&|i| g[i]);
            let h1 = solve(&|_| 1.0);
            let nu = hg.iter().sum::<f64>() / h1.iter().sum::<f64>();
            let step: Vec<f64> = hg.iter().zip(&h1).map(|(a, b)| a - nu * b).collect();
            let decrement: f64 = g.iter().zip(&step).map(|(a, b)| a * b).sum();
            if !(decrement > 1e-14) {
                break;
            }
            let mut t = step
                .iter()
                .zip(&w)
                .filter(|(d, _)| **d < 0.0)
                .map(|(d, x)| -0.99 * x / d)
                .fold(1.0, f64::min);
            let f0 = objective(&w, mu)?;
            let mut accepted = false;
            for _ in 0..40 {
                let trial: Vec<f64> = w.iter().zip(&step).map(|(x, d)| x + t * d).collect();
                if objective(&trial, mu).is_some_and(|f| f >= f0 + 0.25 * t * decrement) {
                    w = trial;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if mu <= mu_end {
            break;
        }
        mu = (0.1 * mu).max(mu_end);
    }
    let total: f64 = w.iter().sum();
    Some(w.into_iter().map(|x| x / total).collect())
}

fn argmax(v: &[f64]) -> (usize, f64) {
    v.iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b })
}

fn scale_weights(u: &mut [f64], f: f64) {
    for w in u.iter_mut() {
        *w *= f;
    }
}

/// Weighted center `c`, moment matrix `S` and the largest score
/// `max (x−c)ᵀS⁻¹(x−c)`.
fn weighted_moments(points: &[Vec2], u: &[f64]) -> Result<(Vec2, Mat2, f64)> {
    let total: f64 = u.iter().sum();
    let origin = points[0];
    let c = origin
        + points
            .iter()
            .zip(u)
            .fold(Vec2::zeros(), |a, (p, &w)| a + w * (p - origin))
            / total;
    let s = points
        .iter()
        .zip(u)
        .fold(Mat2::zeros(), |a, (p, &w)| a + w * (p - c) * (p - c).transpose())
        / total;
    let s = linalg::symmetrize(&s);
    let s_inv = linalg::inverse(&s).ok_or(Error::CollinearInput)?;
    let r = points
        .iter()
        .map(|p| (p - c).dot(&(s_inv * (p - c))))
        .fold(0.0, f64::max);
    Ok((c, s, r))
}

/// Ellipse `(x−c)ᵀS⁻¹(x−c) ≤ r` scaled to pass through the outermost point.
/// Also returns the lifted score `1 + r`.
fn ellipse_from_weights(points: &[Vec2], u: &[f64]) -> Result<(EllipseAffine, f64)> {
    let (c, s, r) = weighted_moments(points, u)?;
    if !(r > 0.0) {
        return Err(Error::CollinearInput);
    }
    let q = linalg::inverse(&s).ok_or(Error::CollinearInput)? / r;
    let b = linalg::spd_sqrt(&linalg::symmetrize(&q));
    let e = EllipseAffine::new(b, -(b * c))?;
    Ok((e, 1.0 + r))
}

/// Relative optimality gap of `sol` on `points`.
///
/// The larger of the dual slack `max score / 3 − 1` implied by the weights,
/// and the excess area of `sol.ellipse` over the ellipse those weights
/// certify.
pub fn certify(sol: &MveeSolution, points: &[Vec2]) -> f64 {
    match ellipse_from_weights(points, &sol.weights) {
        Ok((e, score)) => {
            let dual = score / 3.0 - 1.0;
            let excess = sol.ellipse.area() / e.area() - 1.0;
            dual.max(excess)
        }
        Err(_) => f64::INFINITY,
    }
}
