//! Closed-form 2×2 symmetric linear algebra.
//!
//! Every matrix in this crate is 2×2, so the eigendecomposition is done in
//! closed form instead of through an iterative factorization.

use nalgebra::{Matrix2, Vector2};

pub type Vec2 = Vector2<f64>;
pub type Mat2 = Matrix2<f64>;

/// Eigendecomposition `M = V diag(λ) Vᵀ` of a symmetric 2×2 matrix.
///
/// Eigenvalues are sorted ascending and the columns of `vectors` are the
/// matching orthonormal eigenvectors (with `det(V) = +1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEigen2 {
    pub values: Vec2,
    pub vectors: Mat2,
}

impl SymEigen2 {
    /// Decomposes the symmetric part of `m`; only `m[(0,1)]` is read off-diagonal.
    pub fn new(m: &Mat2) -> Self {
        let a = m[(0, 0)];
        let b = m[(0, 1)];
        let c = m[(1, 1)];
        let half_trace = 0.5 * (a + c);
        let half_diff = 0.5 * (a - c);
        let radius = half_diff.hypot(b);
        let hi = half_trace + radius;
        // The smaller eigenvalue is recovered from the determinant when the
        // direct subtraction would cancel.
        let det = a * c - b * b;
        let direct = half_trace - radius;
        let lo = if hi > f64::MIN_POSITIVE && direct.abs() < 1e-3 * hi {
            det / hi
        } else {
            direct
        };

        // Rotation angle of the eigenvector belonging to `hi`.
        let phi = 0.5 * (2.0 * b).atan2(a - c);
        let (s, co) = phi.sin_cos();
        // Column 0 ↔ lo, column 1 ↔ hi.
        let vectors = Mat2::new(s, co, -co, s);
        Self {
            values: Vec2::new(lo, hi),
            vectors,
        }
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[1]
    }

    /// Rebuilds `V f(Λ) Vᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Mat2 {
        let d = Mat2::from_diagonal(&Vec2::new(f(self.values[0]), f(self.values[1])));
        self.vectors * d * self.vectors.transpose()
    }
}

pub fn symmetrize(m: &Mat2) -> Mat2 {
    let off = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    Mat2::new(m[(0, 0)], off, off, m[(1, 1)])
}

/// Relative asymmetry `|m01 − m10| / max|m_ij|`.
pub fn asymmetry(m: &Mat2) -> f64 {
    let scale = m.amax();
    if scale == 0.0 {
        0.0
    } else {
        (m[(0, 1)] - m[(1, 0)]).abs() / scale
    }
}

/// Inverse of a 2×2 matrix by the adjugate formula; `None` if singular.
pub fn inverse(m: &Mat2) -> Option<Mat2> {
    let det = m.determinant();
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some(Mat2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det)
}

/// The unique SPD square root. Caller guarantees `m` is SPD.
pub fn spd_sqrt(m: &Mat2) -> Mat2 {
    symmetrize(&SymEigen2::new(m).map(f64::sqrt))
}

/// 2D cross product (z-component).
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Angle of `v` against the x-axis in `[0, 2π)`.
pub fn angle_0_2pi(v: &Vec2) -> f64 {
    let a = v[1].atan2(v[0]);
    if a < 0.0 {
        let w = a + std::f64::consts::TAU;
        // -0.0 and tiny negatives can round up to exactly 2π.
        if w >= std::f64::consts::TAU {
            0.0
        } else {
            w
        }
    } else {
        a
    }
}

/// Counter-clockwise angular span from `from` to `to`, normalized into `(0, 2π]`.
pub fn ccw_span(from: f64, to: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let d = (to - from).rem_euclid(tau);
    if d <= 0.0 {
        tau
    } else {
        d
    }
}
