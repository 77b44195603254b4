//! Ellipse representations and the geometric queries built on them.
//!
//! Three equivalent forms are supported:
//!
//! * [`EllipseParam`]: image of the unit disk, `{P y + x_c : ‖y‖ ≤ 1}`.
//! * [`EllipseAffine`]: `{x : ‖B x + d‖ ≤ 1}` with `B = P⁻¹`, `d = −P⁻¹ x_c`.
//! * [`EllipseQuad`]: `{x : xᵀA x + 2 xᵀb + c ≤ 0}`.
//!
//! [`EllipseAffine`] is the working form used by the rest of the crate.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, SymEigen2, Vec2};

/// Relative symmetry tolerance for matrix inputs.
pub const TOL_SYM: f64 = 1e-12;
/// Boundary tolerance used for tangency and on-boundary checks.
pub const TOL_ON: f64 = 1e-8;
/// Smallest accepted normal length for a half-plane.
pub const TOL_DEG: f64 = 1e-14;
/// Largest accepted eigenvalue ratio of a shape matrix.
pub const MAX_CONDITION: f64 = 1e8;

fn check_spd(m: &Mat2) -> Result<(Mat2, SymEigen2)> {
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput("non-finite matrix entry".into()));
    }
    let asym = linalg::asymmetry(m);
    if asym > TOL_SYM {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let sym = linalg::symmetrize(m);
    let eig = SymEigen2::new(&sym);
    if eig.min() <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: eig.min(),
        });
    }
    let condition = eig.max() / eig.min();
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    Ok((sym, eig))
}

fn check_vec(v: &Vec2) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("non-finite vector entry".into()))
    }
}

/// `{P y + x_c : ‖y‖ ≤ 1}` with `P` symmetric positive definite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseParam {
    p: Mat2,
    center: Vec2,
}

impl EllipseParam {
    pub fn new(p: Mat2, center: Vec2) -> Result<Self> {
        let (p, _) = check_spd(&p)?;
        check_vec(&center)?;
        Ok(Self { p, center })
    }

    /// Ellipse with semi-axes `a`, `b`, the `a` axis rotated by `angle` from the x-axis.
    pub fn from_axes(center: Vec2, a: f64, b: f64, angle: f64) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        let r = Mat2::new(c, -s, s, c);
        let p = r * Mat2::from_diagonal(&Vec2::new(a, b)) * r.transpose();
        Self::new(linalg::symmetrize(&p), center)
    }

    pub fn disk(center: Vec2, radius: f64) -> Result<Self> {
        Self::new(Mat2::identity() * radius, center)
    }

    pub fn shape(&self) -> &Mat2 {
        &self.p
    }

    pub fn center(&self) -> &Vec2 {
        &self.center
    }

    pub fn to_affine(&self) -> EllipseAffine {
        let b = linalg::symmetrize(&linalg::inverse(&self.p).expect("SPD matrix is invertible"));
        let d = -(b * self.center);
        EllipseAffine {
            b,
            d,
            p: self.p,
            center: self.center,
        }
    }

    pub fn area(&self) -> f64 {
        PI * self.p.determinant()
    }
}

/// `{x : ‖B x + d‖ ≤ 1}` with `B` symmetric positive definite.
///
/// The unit-disk parameters `P = B⁻¹` and `x_c = −P d` are cached because the
/// arc walk maps points to and from the unit disk constantly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseAffine {
    b: Mat2,
    d: Vec2,
    p: Mat2,
    center: Vec2,
}

impl EllipseAffine {
    pub fn new(b: Mat2, d: Vec2) -> Result<Self> {
        let (b, _) = check_spd(&b)?;
        check_vec(&d)?;
        let p = linalg::symmetrize(&linalg::inverse(&b).expect("SPD matrix is invertible"));
        let center = -(p * d);
        Ok(Self { b, d, p, center })
    }

    pub fn unit_disk() -> Self {
        Self::new(Mat2::identity(), Vec2::zeros()).expect("identity is SPD")
    }

    pub fn from_axes(center: Vec2, a: f64, b: f64, angle: f64) -> Result<Self> {
        Ok(EllipseParam::from_axes(center, a, b, angle)?.to_affine())
    }

    pub fn disk(center: Vec2, radius: f64) -> Result<Self> {
        Ok(EllipseParam::disk(center, radius)?.to_affine())
    }

    pub fn b(&self) -> &Mat2 {
        &self.b
    }

    pub fn d(&self) -> &Vec2 {
        &self.d
    }

    /// Shape matrix `P = B⁻¹`.
    pub fn shape(&self) -> &Mat2 {
        &self.p
    }

    pub fn center(&self) -> &Vec2 {
        &self.center
    }

    pub fn to_param(&self) -> EllipseParam {
        EllipseParam {
            p: self.p,
            center: self.center,
        }
    }

    pub fn to_quad(&self) -> EllipseQuad {
        let a = linalg::symmetrize(&(self.b.transpose() * self.b));
        let b = self.b.transpose() * self.d;
        let c = self.d.dot(&self.d) - 1.0;
        EllipseQuad { a, b, c }
    }

    /// `‖B x + d‖`; `≤ 1` inside, `= 1` on the boundary.
    pub fn norm_at(&self, x: &Vec2) -> f64 {
        (self.b * x + self.d).norm()
    }

    pub fn contains(&self, x: &Vec2, tol: f64) -> bool {
        self.norm_at(x) <= 1.0 + tol
    }

    /// `|‖B x + d‖ − 1|`.
    pub fn boundary_residual(&self, x: &Vec2) -> f64 {
        (self.norm_at(x) - 1.0).abs()
    }

    pub fn area(&self) -> f64 {
        PI / self.b.determinant()
    }

    /// Semi-axis lengths `(minor, major)`.
    pub fn semi_axes(&self) -> (f64, f64) {
        let e = SymEigen2::new(&self.p);
        (e.min(), e.max())
    }

    /// Mean semi-axis; the natural length scale of the ellipse.
    pub fn scale(&self) -> f64 {
        let (lo, hi) = self.semi_axes();
        0.5 * (lo + hi)
    }

    /// Supporting half-plane `(B z + d)ᵀ(B x + d) ≤ 1` at boundary point `z`.
    pub fn tangent_half_plane(&self, z: &Vec2) -> Result<HalfPlane> {
        let residual = self.boundary_residual(z);
        if residual > TOL_ON {
            return Err(Error::NotOnBoundary { residual });
        }
        Ok(self.tangent_unchecked(z))
    }

    pub(crate) fn tangent_unchecked(&self, z: &Vec2) -> HalfPlane {
        let g = self.b * z + self.d;
        HalfPlane {
            normal: self.b.transpose() * g,
            offset: 1.0 - self.d.dot(&g),
        }
    }

    /// Maps `z` to the unit-disk frame: `y = P⁻¹(z − x_c)`.
    pub fn disk_map(&self, z: &Vec2) -> Vec2 {
        self.b * (z - self.center)
    }

    /// Inverse of [`disk_map`](Self::disk_map): `z = P y + x_c`.
    pub fn disk_unmap(&self, y: &Vec2) -> Vec2 {
        self.p * y + self.center
    }

    /// Boundary point at unit-disk angle `theta`.
    pub fn point_at_angle(&self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        self.disk_unmap(&Vec2::new(c, s))
    }

    /// Unit-disk angle of `z` in `[0, 2π)`.
    pub fn angle_of(&self, z: &Vec2) -> f64 {
        linalg::angle_0_2pi(&self.disk_map(z))
    }

    /// Applies `x ↦ T x + t` to the ellipse.
    pub fn transformed(&self, t: &Mat2, shift: &Vec2) -> Result<Self> {
        let t_inv = linalg::inverse(t)
            .ok_or_else(|| Error::InvalidInput("singular transform".into()))?;
        // ‖B T⁻¹(x − t) + d‖ = ‖B' x + d'‖ after a polar factorization to keep B' SPD.
        let bt = self.b * t_inv;
        let a = linalg::symmetrize(&(bt.transpose() * bt));
        let b_new = linalg::spd_sqrt(&a);
        // bt = U b_new with U orthogonal, so ‖bt y + d‖ = ‖b_new y + Uᵀ d‖.
        let u = bt * linalg::inverse(&b_new).expect("SPD");
        let d_rot = u.transpose() * self.d;
        let d_new = d_rot - b_new * shift;
        Self::new(b_new, d_new)
    }
}

/// `{x : xᵀA x + 2 xᵀb + c ≤ 0}` with `A` symmetric positive definite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseQuad {
    a: Mat2,
    b: Vec2,
    c: f64,
}

impl EllipseQuad {
    pub fn new(a: Mat2, b: Vec2, c: f64) -> Result<Self> {
        let (a, _) = check_spd(&a)?;
        check_vec(&b)?;
        if !c.is_finite() {
            return Err(Error::InvalidInput("non-finite constant term".into()));
        }
        let q = Self { a, b, c };
        let margin = q.margin();
        if margin <= 0.0 {
            return Err(Error::EmptyEllipse { margin });
        }
        Ok(q)
    }

    pub fn a(&self) -> &Mat2 {
        &self.a
    }

    pub fn b(&self) -> &Vec2 {
        &self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `bᵀA⁻¹b − c`; equals 1 for a normalized form.
    pub fn margin(&self) -> f64 {
        let a_inv = linalg::inverse(&self.a).expect("SPD");
        self.b.dot(&(a_inv * self.b)) - self.c
    }

    /// Rescales so that `c = bᵀA⁻¹b − 1`.
    pub fn normalized(&self) -> Result<Self> {
        let k = self.margin();
        if k <= 0.0 {
            return Err(Error::EmptyEllipse { margin: k });
        }
        Ok(Self {
            a: self.a / k,
            b: self.b / k,
            c: self.c / k,
        })
    }

    /// `B = A^{1/2}`, `d = A^{-1/2} b` after normalization.
    pub fn to_affine(&self) -> Result<EllipseAffine> {
        let n = self.normalized()?;
        let b = linalg::spd_sqrt(&n.a);
        let d = linalg::inverse(&b).expect("SPD") * n.b;
        EllipseAffine::new(b, d)
    }

    /// `π · margin / √det A`, which is `π det(A^{-1/2})` once normalized.
    pub fn area(&self) -> f64 {
        PI * self.margin() / self.a.determinant().sqrt()
    }

    pub fn eval(&self, x: &Vec2) -> f64 {
        x.dot(&(self.a * x)) + 2.0 * x.dot(&self.b) + self.c
    }
}

/// `{x : n·x ≤ h}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub normal: Vec2,
    pub offset: f64,
}

impl HalfPlane {
    pub fn new(normal: Vec2, offset: f64) -> Result<Self> {
        if normal.norm() <= TOL_DEG {
            return Err(Error::InvalidInput("half-plane normal is zero".into()));
        }
        Ok(Self { normal, offset })
    }

    /// Signed distance of `x` past the boundary line (positive = outside).
    pub fn violation(&self, x: &Vec2) -> f64 {
        (self.normal.dot(x) - self.offset) / self.normal.norm()
    }

    pub fn contains(&self, x: &Vec2, tol: f64) -> bool {
        self.violation(x) <= tol
    }

    /// Same half-plane with a unit normal.
    pub fn normalized(&self) -> Self {
        let n = self.normal.norm();
        Self {
            normal: self.normal / n,
            offset: self.offset / n,
        }
    }
}

/// Serialized ellipse: either `{"P": [[..]], "xc": [..]}` or `{"A": [[..]], "b": [..], "c": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EllipseRecord {
    Param {
        #[serde(rename = "P")]
        p: [[f64; 2]; 2],
        xc: [f64; 2],
    },
    Quad {
        #[serde(rename = "A")]
        a: [[f64; 2]; 2],
        b: [f64; 2],
        c: f64,
    },
}

fn mat_from_rows(rows: &[[f64; 2]; 2]) -> Mat2 {
    Mat2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
}

fn rows_from_mat(m: &Mat2) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

impl EllipseRecord {
    pub fn to_affine(&self) -> Result<EllipseAffine> {
        match self {
            EllipseRecord::Param { p, xc } => {
                Ok(EllipseParam::new(mat_from_rows(p), Vec2::new(xc[0], xc[1]))?.to_affine())
            }
            EllipseRecord::Quad { a, b, c } => {
                EllipseQuad::new(mat_from_rows(a), Vec2::new(b[0], b[1]), *c)?.to_affine()
            }
        }
    }

    pub fn from_param(e: &EllipseParam) -> Self {
        EllipseRecord::Param {
            p: rows_from_mat(e.shape()),
            xc: [e.center()[0], e.center()[1]],
        }
    }
}

impl From<&EllipseAffine> for EllipseRecord {
    fn from(e: &EllipseAffine) -> Self {
        Self::from_param(&e.to_param())
    }
}
