//! Bounding polygons from tangent half-planes.
//!
//! [`build_polygon`] exploits the angular order of the boundary points: each
//! polygon vertex is the crossing of the tangent lines at two neighbouring
//! points, so only one 2×2 solve per vertex is needed. Candidates that are
//! unbounded (parallel tangents) or cut off by another tangent are reported as
//! a [`Degeneracy`] of the arc they came from, and the caller refines that arc.
//!
//! [`intersect_half_planes`] is the generic sort-and-deque construction used by
//! the discretize-and-reject baseline.

use std::collections::VecDeque;

use crate::arc::ArcSegment;
use crate::conic::{EllipseAffine, HalfPlane};
use crate::error::{Error, Result};
use crate::linalg::{self, Vec2};

/// Relative tolerance of the vertex feasibility test (times the polygon scale).
pub const TOL_VERIFY: f64 = 1e-9;
/// Relative determinant below which two lines count as parallel.
pub const TOL_PARALLEL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexSource {
    /// A corner of the feasible region (index into the ordered boundary points).
    Boundary(usize),
    /// Crossing of two neighbouring tangent lines on the given arc.
    Tangent { arc: usize },
    /// Vertex of a generic half-plane intersection.
    HalfPlanes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundingPolygon {
    /// Counter-clockwise vertices.
    pub vertices: Vec<Vec2>,
    pub sources: Vec<VertexSource>,
}

impl BoundingPolygon {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n)
            .map(|i| linalg::cross(&self.vertices[i], &self.vertices[(i + 1) % n]))
            .sum::<f64>()
    }

    /// Mean distance of the vertices from their centroid plus the centroid's
    /// magnitude; sets the absolute size of geometric tolerances.
    pub fn scale(&self) -> f64 {
        polygon_scale(&self.vertices)
    }

    /// Largest signed distance of `x` outside any edge line (≤ 0 inside).
    pub fn edge_violation(&self, x: &Vec2) -> f64 {
        let n = self.vertices.len();
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let e = b - a;
            let len = e.norm();
            if len <= 1e-14 * self.scale() {
                continue;
            }
            // Outside is to the right of a counter-clockwise edge.
            worst = worst.max(-linalg::cross(&e, &(x - a)) / len);
        }
        worst
    }

    pub fn contains(&self, x: &Vec2, tol: f64) -> bool {
        self.edge_violation(x) <= tol
    }

    /// Smallest turn `cross(e_i, e_{i+1})` over consecutive edges.
    pub fn min_turn(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                let c = self.vertices[(i + 2) % n];
                linalg::cross(&(b - a), &(c - b))
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_convex(&self) -> bool {
        let s = self.scale();
        self.min_turn() >= -TOL_VERIFY * s * s
    }
}

fn polygon_scale(v: &[Vec2]) -> f64 {
    if v.is_empty() {
        return 1.0;
    }
    let n = v.len() as f64;
    let c = v.iter().fold(Vec2::zeros(), |a, p| a + p) / n;
    let spread = v.iter().map(|p| (p - c).norm()).sum::<f64>() / n;
    (spread + c.norm()).max(f64::MIN_POSITIVE)
}

/// Crossing of the two boundary lines `n₁·x = h₁`, `n₂·x = h₂`.
pub fn line_pair_vertex(h1: &HalfPlane, h2: &HalfPlane) -> Result<Vec2> {
    let det = linalg::cross(&h1.normal, &h2.normal);
    if det.abs() <= TOL_PARALLEL * h1.normal.norm() * h2.normal.norm() {
        return Err(Error::ParallelLines);
    }
    Ok(Vec2::new(
        (h1.offset * h2.normal[1] - h2.offset * h1.normal[1]) / det,
        (h1.normal[0] * h2.offset - h2.normal[0] * h1.offset) / det,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegeneracyMode {
    /// Neighbouring tangents are parallel, so the polygon would be unbounded
    /// on that side.
    Parallel,
    /// The crossing of neighbouring tangents violates another tangent
    /// inequality (including a turn of more than half a revolution, where the
    /// crossing lies behind the arc) or breaks convexity.
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Degeneracy {
    pub arc: usize,
    pub mode: DegeneracyMode,
}

/// Builds the bounding polygon from arcs and their interior points.
///
/// `arc_pts[i]` holds the interior points of `arcs[i]` in counter-clockwise
/// order; `arcs` must tile the boundary so that `arcs[i].end` is
/// `arcs[(i + 1) % n].start`.
pub fn build_polygon(
    ellipses: &[EllipseAffine],
    arcs: &[ArcSegment],
    arc_pts: &[Vec<Vec2>],
) -> std::result::Result<BoundingPolygon, Degeneracy> {
    assert_eq!(arcs.len(), arc_pts.len(), "one point list per arc");

    // Tangent sequences per arc: start, interior points, end.
    let tangents: Vec<Vec<HalfPlane>> = arcs
        .iter()
        .zip(arc_pts)
        .map(|(arc, pts)| {
            let e = &ellipses[arc.owner];
            std::iter::once(&arc.start.z)
                .chain(pts.iter())
                .chain(std::iter::once(&arc.end.z))
                .map(|z| e.tangent_unchecked(z))
                .collect()
        })
        .collect();

    let mut candidates: Vec<Vec<Vec2>> = Vec::with_capacity(arcs.len());
    for (i, seq) in tangents.iter().enumerate() {
        let mut out = Vec::with_capacity(seq.len() - 1);
        for w in seq.windows(2) {
            let det = linalg::cross(&w[0].normal, &w[1].normal);
            let tol = TOL_PARALLEL * w[0].normal.norm() * w[1].normal.norm();
            if det <= tol {
                let mode = if det.abs() <= tol {
                    DegeneracyMode::Parallel
                } else {
                    // Turned by more than π: the crossing lies behind the arc.
                    DegeneracyMode::Infeasible
                };
                return Err(Degeneracy { arc: i, mode });
            }
            match line_pair_vertex(&w[0], &w[1]) {
                Ok(v) if v.iter().all(|c| c.is_finite()) => out.push(v),
                _ => {
                    return Err(Degeneracy {
                        arc: i,
                        mode: DegeneracyMode::Parallel,
                    })
                }
            }
        }
        candidates.push(out);
    }

    let all_vertices: Vec<Vec2> = arcs
        .iter()
        .zip(&candidates)
        .flat_map(|(a, c)| std::iter::once(a.start.z).chain(c.iter().copied()))
        .collect();
    let tol = TOL_VERIFY * polygon_scale(&all_vertices);

    for (i, cands) in candidates.iter().enumerate() {
        for v in cands {
            let bad = tangents
                .iter()
                .flatten()
                .any(|h| h.violation(v) > tol);
            if bad {
                return Err(Degeneracy {
                    arc: i,
                    mode: DegeneracyMode::Infeasible,
                });
            }
        }
    }

    let mut tagged: Vec<(Vec2, VertexSource, usize)> = Vec::with_capacity(all_vertices.len());
    for (i, (arc, cands)) in arcs.iter().zip(&candidates).enumerate() {
        tagged.push((arc.start.z, VertexSource::Boundary(i), i));
        for v in cands {
            tagged.push((*v, VertexSource::Tangent { arc: i }, i));
        }
    }

    // Re-sort by angle about the vertex centroid; for very flat arcs adjacent
    // candidates can swap within rounding.
    let centroid = all_vertices.iter().fold(Vec2::zeros(), |a, p| a + p) / all_vertices.len() as f64;
    let key = |v: &Vec2| {
        let d = v - centroid;
        (linalg::angle_0_2pi(&d), d.norm())
    };
    tagged.sort_by(|a, b| {
        let (ka, kb) = (key(&a.0), key(&b.0));
        ka.0.total_cmp(&kb.0).then_with(|| ka.1.total_cmp(&kb.1))
    });

    let poly = BoundingPolygon {
        vertices: tagged.iter().map(|t| t.0).collect(),
        sources: tagged.iter().map(|t| t.1).collect(),
    };
    if poly.len() < 3 {
        return Err(Degeneracy {
            arc: 0,
            mode: DegeneracyMode::Parallel,
        });
    }
    let s = poly.scale();
    let n = poly.len();
    for k in 0..n {
        let a = poly.vertices[k];
        let b = poly.vertices[(k + 1) % n];
        let c = poly.vertices[(k + 2) % n];
        if linalg::cross(&(b - a), &(c - b)) < -TOL_VERIFY * s * s {
            return Err(Degeneracy {
                arc: tagged[(k + 1) % n].2,
                mode: DegeneracyMode::Infeasible,
            });
        }
    }
    Ok(poly)
}

/// Generic half-plane intersection (sort by direction, then a deque sweep).
pub fn intersect_half_planes(hps: &[HalfPlane]) -> Result<BoundingPolygon> {
    if hps.iter().any(|h| h.normal.norm() <= crate::conic::TOL_DEG) {
        return Err(Error::InvalidInput("half-plane normal is zero".into()));
    }
    let mut planes: Vec<(f64, HalfPlane)> = hps
        .iter()
        .map(|h| {
            let u = h.normalized();
            (linalg::angle_0_2pi(&u.normal), u)
        })
        .collect();
    planes.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.offset.total_cmp(&b.1.offset)));

    // Bounded iff the normals leave no angular gap of π or more.
    let tau = std::f64::consts::TAU;
    let max_gap = (0..planes.len())
        .map(|i| {
            let next = if i + 1 < planes.len() {
                planes[i + 1].0
            } else {
                planes[0].0 + tau
            };
            next - planes[i].0
        })
        .fold(0.0f64, f64::max);
    if planes.len() < 3 || max_gap >= std::f64::consts::PI * (1.0 - 1e-12) {
        return Err(Error::Unbounded);
    }

    // Keep only the tightest of each direction.
    let mut unique: Vec<HalfPlane> = Vec::with_capacity(planes.len());
    let mut last_angle = f64::NAN;
    for (angle, h) in planes {
        if (angle - last_angle).abs() <= 1e-12 {
            continue;
        }
        last_angle = angle;
        unique.push(h);
    }
    // Same direction at 0 and just below 2π.
    if unique.len() > 1 {
        let first = unique[0];
        let last = *unique.last().unwrap();
        if linalg::cross(&first.normal, &last.normal).abs() <= 1e-12
            && first.normal.dot(&last.normal) > 0.0
        {
            if last.offset < first.offset {
                unique[0] = last;
            }
            unique.pop();
        }
    }

    let scale = unique.iter().map(|h| h.offset.abs()).fold(1e-300f64, f64::max);
    let tol = 1e-12 * scale;
    let outside = |h: &HalfPlane, p: Option<Vec2>| p.is_some_and(|p| h.violation(&p) > tol);
    let meet = |a: &HalfPlane, b: &HalfPlane| line_pair_vertex(a, b).ok();

    let mut dq: VecDeque<HalfPlane> = VecDeque::new();
    for h in unique {
        while dq.len() >= 2 && outside(&h, meet(&dq[dq.len() - 2], &dq[dq.len() - 1])) {
            dq.pop_back();
        }
        while dq.len() >= 2 && outside(&h, meet(&dq[0], &dq[1])) {
            dq.pop_front();
        }
        if let Some(last) = dq.back() {
            let anti = linalg::cross(&h.normal, &last.normal).abs() <= 1e-12
                && h.normal.dot(&last.normal) < 0.0;
            if anti && h.offset + last.offset <= tol {
                return Err(Error::EmptyPolygon);
            }
        }
        dq.push_back(h);
    }
    while dq.len() >= 3 && outside(&dq[0], meet(&dq[dq.len() - 2], &dq[dq.len() - 1])) {
        dq.pop_back();
    }
    while dq.len() >= 3 && outside(&dq[dq.len() - 1], meet(&dq[0], &dq[1])) {
        dq.pop_front();
    }
    if dq.len() < 3 {
        return Err(Error::EmptyPolygon);
    }

    let n = dq.len();
    let mut vertices: Vec<Vec2> = Vec::with_capacity(n);
    for i in 0..n {
        let v = meet(&dq[i], &dq[(i + 1) % n]).ok_or(Error::EmptyPolygon)?;
        if vertices.last().is_none_or(|w: &Vec2| (w - v).norm() > tol) {
            vertices.push(v);
        }
    }
    if vertices.len() > 1 && (vertices[0] - vertices[vertices.len() - 1]).norm() <= tol {
        vertices.pop();
    }
    if vertices.len() < 3 {
        return Err(Error::EmptyPolygon);
    }
    let vtol = 1e-9 * polygon_scale(&vertices);
    if vertices
        .iter()
        .any(|v| hps.iter().any(|h| h.violation(v) > vtol))
    {
        return Err(Error::EmptyPolygon);
    }
    let sources = vec![VertexSource::HalfPlanes; vertices.len()];
    let poly = BoundingPolygon { vertices, sources };
    if poly.area() <= 0.0 {
        return Err(Error::EmptyPolygon);
    }
    Ok(poly)
}
