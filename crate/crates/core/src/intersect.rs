//! Ellipse–ellipse intersection points and reduction of the input set to the
//! ellipses and corner points that actually bound the feasible region.

use std::collections::BTreeSet;

use crate::conic::{EllipseAffine, TOL_ON};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{Mat2, Vec2};
use crate::roots::{companion_roots, Poly};

/// Relative merge distance for intersection points (times the pair scale).
pub const TOL_MERGE_REL: f64 = 1e-7;
/// Boundary residual every returned intersection point satisfies.
pub const TOL_PAIR_RESIDUAL: f64 = 1e-9;

const MAX_NEWTON: usize = 5;
/// Largest imaginary part (in the pair's normalized frame) still treated as a
/// perturbed real root.
const TOL_IMAG: f64 = 1e-5;

/// A corner of the feasible region where two or more ellipse boundaries meet.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    pub z: Vec2,
    /// Sorted, de-duplicated ellipse indices whose boundary passes through `z`.
    pub owners: Vec<usize>,
}

impl BoundaryPoint {
    pub fn new(z: Vec2, owners: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = owners.into_iter().collect();
        Self {
            z,
            owners: set.into_iter().collect(),
        }
    }

    pub fn has_owner(&self, k: usize) -> bool {
        self.owners.binary_search(&k).is_ok()
    }
}

/// Conic `a x² + 2h xy + b y² + 2g x + 2f y + c` in a pair-local frame.
#[derive(Debug, Clone, Copy)]
struct LocalConic {
    a: f64,
    h: f64,
    b: f64,
    g: f64,
    f: f64,
    c: f64,
}

impl LocalConic {
    /// Expresses `e` in coordinates `u` with `x = origin + scale·u`.
    fn new(e: &EllipseAffine, origin: &Vec2, scale: f64) -> Self {
        let q = e.to_quad();
        let a: Mat2 = q.a() * (scale * scale);
        let lin = (q.a() * origin + q.b()) * scale;
        let c = origin.dot(&(q.a() * origin)) + 2.0 * origin.dot(q.b()) + q.c();
        Self {
            a: a[(0, 0)],
            h: 0.5 * (a[(0, 1)] + a[(1, 0)]),
            b: a[(1, 1)],
            g: lin[0],
            f: lin[1],
            c,
        }
    }

    fn coeffs(&self) -> [f64; 6] {
        [self.a, self.h, self.b, self.g, self.f, self.c]
    }

    fn eval(&self, u: &Vec2) -> f64 {
        let (x, y) = (u[0], u[1]);
        self.a * x * x + 2.0 * self.h * x * y + self.b * y * y + 2.0 * self.g * x + 2.0 * self.f * y + self.c
    }

    fn grad(&self, u: &Vec2) -> Vec2 {
        let (x, y) = (u[0], u[1]);
        Vec2::new(
            2.0 * (self.a * x + self.h * y + self.g),
            2.0 * (self.h * x + self.b * y + self.f),
        )
    }

    /// Coefficients of the quadratic in `y`: `α y² + β(x) y + γ(x)`, each as a polynomial in `x`.
    fn in_y(&self) -> (Poly, Poly, Poly) {
        (
            Poly(vec![self.b]),
            Poly(vec![2.0 * self.f, 2.0 * self.h]),
            Poly(vec![self.c, 2.0 * self.g, self.a]),
        )
    }

    fn y_candidates(&self, x: f64) -> [f64; 2] {
        let beta = 2.0 * self.h * x + 2.0 * self.f;
        let gamma = self.a * x * x + 2.0 * self.g * x + self.c;
        let disc = (beta * beta - 4.0 * self.b * gamma).max(0.0);
        let s = disc.sqrt();
        let q = -0.5 * (beta + if beta >= 0.0 { s } else { -s });
        if q == 0.0 {
            [0.0, 0.0]
        } else {
            [q / self.b, gamma / q]
        }
    }
}

fn pmul(p: &Poly, q: &Poly) -> Poly {
    let mut out = vec![0.0; p.0.len() + q.0.len() - 1];
    for (i, a) in p.0.iter().enumerate() {
        for (j, b) in q.0.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    Poly(out)
}

fn psub(p: &Poly, q: &Poly) -> Poly {
    let n = p.0.len().max(q.0.len());
    Poly(
        (0..n)
            .map(|k| p.0.get(k).copied().unwrap_or(0.0) - q.0.get(k).copied().unwrap_or(0.0))
            .collect(),
    )
}

/// Resultant in `y` of the two conics: a polynomial of degree ≤ 4 in `x`.
fn resultant(c1: &LocalConic, c2: &LocalConic) -> Poly {
    let (a1, b1, g1) = c1.in_y();
    let (a2, b2, g2) = c2.in_y();
    let ag = psub(&pmul(&a1, &g2), &pmul(&a2, &g1));
    let ab = psub(&pmul(&a1, &b2), &pmul(&a2, &b1));
    let bg = psub(&pmul(&b1, &g2), &pmul(&b2, &g1));
    psub(&pmul(&ag, &ag), &pmul(&ab, &bg))
}

fn newton_polish(c1: &LocalConic, c2: &LocalConic, mut u: Vec2) -> Vec2 {
    for _ in 0..MAX_NEWTON {
        let f = Vec2::new(c1.eval(&u), c2.eval(&u));
        if f.amax() == 0.0 {
            break;
        }
        let g1 = c1.grad(&u);
        let g2 = c2.grad(&u);
        let det = g1[0] * g2[1] - g1[1] * g2[0];
        if det.abs() <= 1e-14 * g1.norm() * g2.norm() {
            break;
        }
        let step = Vec2::new(
            (g2[1] * f[0] - g1[1] * f[1]) / det,
            (-g2[0] * f[0] + g1[0] * f[1]) / det,
        );
        let next = u - step;
        if !next.iter().all(|v| v.is_finite()) {
            break;
        }
        u = next;
        if step.amax() <= 1e-16 * u.amax().max(1.0) {
            break;
        }
    }
    u
}

/// Length scale used for merge tolerances of a pair.
pub fn pair_scale(e1: &EllipseAffine, e2: &EllipseAffine) -> f64 {
    0.5 * (e1.scale() + e2.scale())
}

/// All real common boundary points of two ellipses (0 to 4 points).
pub fn pair_intersections(e1: &EllipseAffine, e2: &EllipseAffine) -> Result<Vec<Vec2>> {
    let origin = 0.5 * (e1.center() + e2.center());
    let scale = pair_scale(e1, e2);
    let c1 = LocalConic::new(e1, &origin, scale);
    let c2 = LocalConic::new(e2, &origin, scale);

    // Both quads are normalized (c = bᵀA⁻¹b − 1), so the same point set gives
    // the same coefficients.
    let k1 = c1.coeffs();
    let k2 = c2.coeffs();
    let cmax = k1.iter().chain(&k2).fold(0.0f64, |m, v| m.max(v.abs()));
    if k1.iter().zip(&k2).all(|(a, b)| (a - b).abs() <= 1e-12 * cmax) {
        return Err(Error::CoincidentEllipses(0, 1));
    }

    let res = resultant(&c1, &c2).trimmed(1e-12);
    if res.degree().is_none() {
        return Err(Error::CoincidentEllipses(0, 1));
    }

    let mut candidates: Vec<Vec2> = Vec::new();
    for (re, im) in companion_roots(&res)? {
        if im.abs() > TOL_IMAG * re.abs().max(1.0) {
            continue;
        }
        for conic in [&c1, &c2] {
            for y in conic.y_candidates(re) {
                candidates.push(newton_polish(&c1, &c2, Vec2::new(re, y)));
            }
        }
    }

    let tol_merge = TOL_MERGE_REL * scale;
    let mut out: Vec<(Vec2, f64)> = Vec::new();
    for u in candidates {
        let z = origin + u * scale;
        let r = e1.boundary_residual(&z).max(e2.boundary_residual(&z));
        if !(r <= TOL_PAIR_RESIDUAL) {
            continue;
        }
        match out.iter_mut().find(|(w, _)| (w - z).norm() <= tol_merge) {
            Some(slot) => {
                if r < slot.1 {
                    *slot = (z, r);
                }
            }
            None => out.push((z, r)),
        }
    }
    out.sort_by(|a, b| {
        a.0[0]
            .total_cmp(&b.0[0])
            .then_with(|| a.0[1].total_cmp(&b.0[1]))
    });
    Ok(out.into_iter().map(|(z, _)| z).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nesting {
    FirstContainsSecond,
    SecondContainsFirst,
    Neither,
}

fn probes(e: &EllipseAffine) -> [Vec2; 4] {
    [
        e.disk_unmap(&Vec2::new(1.0, 0.0)),
        e.disk_unmap(&Vec2::new(0.0, 1.0)),
        e.disk_unmap(&Vec2::new(-1.0, 0.0)),
        e.disk_unmap(&Vec2::new(0.0, -1.0)),
    ]
}

/// Containment test for a pair whose boundaries meet in at most one point.
pub fn nesting(e1: &EllipseAffine, e2: &EllipseAffine) -> Nesting {
    if probes(e2).iter().all(|p| e1.contains(p, TOL_ON)) {
        Nesting::FirstContainsSecond
    } else if probes(e1).iter().all(|p| e2.contains(p, TOL_ON)) {
        Nesting::SecondContainsFirst
    } else {
        Nesting::Neither
    }
}

/// Result of reducing the input set.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    /// Indices (into the input) of ellipses that bound the feasible region.
    pub active: Vec<usize>,
    /// Corners of the feasible region.
    pub points: Vec<BoundaryPoint>,
}

pub fn reduce_and_collect(ellipses: &[EllipseAffine]) -> Result<Reduction> {
    reduce_and_collect_with(ellipses, Execution::default())
}

pub fn reduce_and_collect_with(ellipses: &[EllipseAffine], exec: Execution) -> Result<Reduction> {
    let m = ellipses.len();
    if m == 0 {
        return Err(Error::InvalidInput("no ellipses".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect();
    let found = exec.map(&pairs, |&(i, j)| pair_intersections(&ellipses[i], &ellipses[j]));

    let mut active = vec![true; m];
    for (&(i, j), pts) in pairs.iter().zip(&found) {
        if !(active[i] && active[j]) {
            continue;
        }
        match pts {
            // Duplicate input: keep the first copy.
            Err(Error::CoincidentEllipses(..)) => active[j] = false,
            Err(e) => return Err(e.clone()),
            Ok(p) if p.len() <= 1 => match nesting(&ellipses[i], &ellipses[j]) {
                Nesting::FirstContainsSecond => active[i] = false,
                Nesting::SecondContainsFirst => active[j] = false,
                Nesting::Neither => return Err(Error::EmptyIntersection),
            },
            Ok(_) => {}
        }
    }
    let active_idx: Vec<usize> = (0..m).filter(|&k| active[k]).collect();
    if active_idx.len() == 1 {
        return Ok(Reduction {
            active: active_idx,
            points: Vec::new(),
        });
    }

    let inside_all =
        |z: &Vec2| active_idx.iter().all(|&k| ellipses[k].contains(z, TOL_ON));

    let mut clusters: Vec<(Vec2, BTreeSet<usize>, f64)> = Vec::new();
    for (&(i, j), pts) in pairs.iter().zip(&found) {
        if !(active[i] && active[j]) {
            continue;
        }
        let Ok(pts) = pts else { continue };
        let tol = TOL_MERGE_REL * pair_scale(&ellipses[i], &ellipses[j]);
        for z in pts.iter().filter(|z| inside_all(z)) {
            match clusters
                .iter_mut()
                .find(|(w, _, t)| (w - z).norm() <= tol.max(*t))
            {
                Some((_, owners, t)) => {
                    owners.insert(i);
                    owners.insert(j);
                    *t = t.max(tol);
                }
                None => clusters.push((*z, BTreeSet::from([i, j]), tol)),
            }
        }
    }

    let points: Vec<BoundaryPoint> = clusters
        .into_iter()
        .map(|(z, mut owners, _)| {
            for &k in &active_idx {
                if ellipses[k].boundary_residual(&z) <= TOL_ON {
                    owners.insert(k);
                }
            }
            BoundaryPoint::new(z, owners)
        })
        .collect();

    // Several distinct bounding ellipses need at least two corners; anything
    // less means the region is empty or has no interior.
    if points.len() < 2 {
        return Err(Error::EmptyIntersection);
    }
    Ok(Reduction {
        active: active_idx,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cross_pair() -> (EllipseAffine, EllipseAffine) {
        (
            EllipseAffine::from_axes(Vec2::zeros(), 2.0, 1.0, 0.0).unwrap(),
            EllipseAffine::from_axes(Vec2::zeros(), 1.0, 2.0, 0.0).unwrap(),
        )
    }

    fn contains_point(pts: &[Vec2], want: Vec2, tol: f64) -> bool {
        pts.iter().any(|p| (p - want).amax() <= tol)
    }

    #[test]
    fn cross_has_four_symmetric_points() {
        let (a, b) = cross_pair();
        let pts = pair_intersections(&a, &b).unwrap();
        assert_eq!(pts.len(), 4);
        let s = 2.0 / 5f64.sqrt();
        for sx in [-1.0, 1.0] {
            for sy in [-1.0, 1.0] {
                assert!(contains_point(&pts, Vec2::new(sx * s, sy * s), 1e-12));
            }
        }
    }

    #[test]
    fn lens_points_share_x() {
        let a = EllipseAffine::disk(Vec2::new(-0.5, 0.0), 1.0).unwrap();
        let b = EllipseAffine::disk(Vec2::new(0.5, 0.0), 1.0).unwrap();
        let pts = pair_intersections(&a, &b).unwrap();
        assert_eq!(pts.len(), 2);
        let h = 3f64.sqrt() / 2.0;
        assert!(contains_point(&pts, Vec2::new(0.0, h), 1e-12));
        assert!(contains_point(&pts, Vec2::new(0.0, -h), 1e-12));
    }

    #[test]
    fn nested_disks_have_no_points() {
        let a = EllipseAffine::unit_disk();
        let b = EllipseAffine::disk(Vec2::zeros(), 3.0).unwrap();
        assert!(pair_intersections(&a, &b).unwrap().is_empty());
        assert_eq!(nesting(&a, &b), Nesting::SecondContainsFirst);
        assert_eq!(nesting(&b, &a), Nesting::FirstContainsSecond);
    }

    #[test]
    fn disjoint_disks_are_neither() {
        let a = EllipseAffine::unit_disk();
        let b = EllipseAffine::disk(Vec2::new(10.0, 0.0), 1.0).unwrap();
        assert!(pair_intersections(&a, &b).unwrap().is_empty());
        assert_eq!(nesting(&a, &b), Nesting::Neither);
    }

    #[test]
    fn internally_tangent_pair() {
        let wide = EllipseAffine::from_axes(Vec2::zeros(), 2.0, 1.0, 0.0).unwrap();
        let disk = EllipseAffine::unit_disk();
        let pts = pair_intersections(&wide, &disk).unwrap();
        // Two tangential contacts at (0, ±1), each a merged double root.
        assert_eq!(pts.len(), 2);
        assert!(contains_point(&pts, Vec2::new(0.0, 1.0), 1e-7));
        assert!(contains_point(&pts, Vec2::new(0.0, -1.0), 1e-7));
        assert_eq!(nesting(&wide, &disk), Nesting::FirstContainsSecond);
    }

    #[test]
    fn single_tangent_contact_merges_to_one_point() {
        let a = EllipseAffine::unit_disk();
        let b = EllipseAffine::disk(Vec2::new(2.0, 0.0), 1.0).unwrap();
        let pts = pair_intersections(&a, &b).unwrap();
        assert_eq!(pts.len(), 1);
        assert_relative_eq!(pts[0], Vec2::new(1.0, 0.0), epsilon = 1e-7);
    }

    #[test]
    fn coincident_is_an_error() {
        let a = EllipseAffine::from_axes(Vec2::new(1.0, 2.0), 2.0, 1.0, 0.3).unwrap();
        assert_eq!(
            pair_intersections(&a, &a.clone()),
            Err(Error::CoincidentEllipses(0, 1))
        );
    }

    #[test]
    fn reduce_nested_pair() {
        let e = [
            EllipseAffine::unit_disk(),
            EllipseAffine::disk(Vec2::zeros(), 3.0).unwrap(),
        ];
        let r = reduce_and_collect(&e).unwrap();
        assert_eq!(r.active, vec![0]);
        assert!(r.points.is_empty());
    }

    #[test]
    fn reduce_cross() {
        let (a, b) = cross_pair();
        let r = reduce_and_collect(&[a, b]).unwrap();
        assert_eq!(r.active, vec![0, 1]);
        assert_eq!(r.points.len(), 4);
        assert!(r.points.iter().all(|p| p.owners == vec![0, 1]));
    }

    #[test]
    fn reduce_three_disks_triangle() {
        // Unit disks at the vertices of an equilateral triangle with side 1.
        let h = 3f64.sqrt() / 2.0;
        let centers = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.5, h)];
        let e: Vec<_> = centers
            .iter()
            .map(|c| EllipseAffine::disk(*c, 1.0).unwrap())
            .collect();

        // Brute-force oracle: circle-pair chord points and membership of all six.
        let mut expected = Vec::new();
        for i in 0..3 {
            for j in i + 1..3 {
                let (ci, cj) = (centers[i], centers[j]);
                let dvec = cj - ci;
                let dist = dvec.norm();
                let mid = ci + dvec * 0.5;
                let half = (1.0 - 0.25 * dist * dist).sqrt();
                let perp = Vec2::new(-dvec[1], dvec[0]) / dist;
                for s in [-1.0, 1.0] {
                    let p = mid + perp * (s * half);
                    if centers.iter().all(|c| (p - c).norm() <= 1.0 + 1e-12) {
                        expected.push(p);
                    }
                }
            }
        }
        assert_eq!(expected.len(), 3);

        let r = reduce_and_collect(&e).unwrap();
        assert_eq!(r.points.len(), 3);
        for p in &expected {
            assert!(r.points.iter().any(|b| (b.z - p).norm() < 1e-12));
        }
        for b in &r.points {
            assert_eq!(b.owners.len(), 2);
        }
    }

    #[test]
    fn reduce_detects_empty() {
        let e = [
            EllipseAffine::unit_disk(),
            EllipseAffine::disk(Vec2::new(10.0, 0.0), 1.0).unwrap(),
        ];
        assert_eq!(reduce_and_collect(&e), Err(Error::EmptyIntersection));

        // Pairwise overlapping, jointly empty.
        let e: Vec<_> = (0..3)
            .map(|k| {
                let t = k as f64 * std::f64::consts::TAU / 3.0;
                EllipseAffine::disk(Vec2::new(1.9 * t.cos(), 1.9 * t.sin()), 1.0).unwrap()
            })
            .collect();
        assert_eq!(reduce_and_collect(&e), Err(Error::EmptyIntersection));
    }

    #[test]
    fn reduce_merges_triple_point() {
        // Three disks through the origin: all three boundaries meet at (0, 0).
        let e: Vec<_> = [Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(0.8, 0.6)]
            .iter()
            .map(|c| EllipseAffine::disk(*c, 1.0).unwrap())
            .collect();
        let r = reduce_and_collect(&e).unwrap();
        let origin = r
            .points
            .iter()
            .find(|p| p.z.norm() < 1e-9)
            .expect("triple point kept");
        assert_eq!(origin.owners, vec![0, 1, 2]);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let e: Vec<_> = (0..6)
            .map(|k| {
                let t = k as f64;
                EllipseAffine::from_axes(Vec2::new(0.3 * t.cos(), 0.3 * t.sin()), 1.5, 1.0, 0.5 * t)
                    .unwrap()
            })
            .collect();
        assert_eq!(
            reduce_and_collect_with(&e, Execution::Sequential),
            reduce_and_collect_with(&e, Execution::Parallel)
        );
    }
}
