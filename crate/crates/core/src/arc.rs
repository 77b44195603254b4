//! Walking the boundary of the feasible region: angular ordering of the
//! corner points, owner identification for each arc, and refinement points.

use std::f64::consts::TAU;

use crate::conic::{EllipseAffine, TOL_ON};
use crate::error::{Error, Result};
use crate::intersect::{BoundaryPoint, Reduction};
use crate::linalg::{self, Vec2};

/// One elliptic arc of the feasible-region boundary, traversed counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSegment {
    pub owner: usize,
    pub start: BoundaryPoint,
    pub end: BoundaryPoint,
    /// Unit-disk angle of `start` on the owner ellipse.
    pub theta1: f64,
    /// Unit-disk angle of `end` on the owner ellipse.
    pub theta2: f64,
    /// Refinement density: points per full turn of the owner's unit circle.
    pub level: usize,
}

impl ArcSegment {
    pub fn new(owner: &EllipseAffine, owner_index: usize, start: BoundaryPoint, end: BoundaryPoint, level: usize) -> Self {
        let theta1 = owner.angle_of(&start.z);
        let theta2 = owner.angle_of(&end.z);
        Self {
            owner: owner_index,
            start,
            end,
            theta1,
            theta2,
            level,
        }
    }

    /// Counter-clockwise disk-angle span from start to end, in `(0, 2π]`.
    pub fn span(&self) -> f64 {
        linalg::ccw_span(self.theta1, self.theta2)
    }

    /// Number of interior points generated at density `m`: `floor(Δ m / 2π)`.
    pub fn interior_count(&self, m: usize) -> usize {
        let x = self.span() * m as f64 / TAU;
        // Guard exact multiples against rounding just below the integer.
        (x * (1.0 + 1e-12)).floor() as usize
    }

    pub fn midpoint(&self, owner: &EllipseAffine) -> Vec2 {
        owner.point_at_angle(self.theta1 + 0.5 * self.span())
    }
}

/// Sorts points by angle about their mean; ties go to the nearer point.
pub fn order_points(points: &[BoundaryPoint]) -> Result<(Vec<BoundaryPoint>, Vec2)> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("need at least two boundary points".into()));
    }
    let mean = points.iter().fold(Vec2::zeros(), |acc, p| acc + p.z) / points.len() as f64;
    let scale = points
        .iter()
        .map(|p| (p.z - mean).norm())
        .fold(0.0f64, f64::max)
        .max(mean.amax());
    let coincident = points
        .iter()
        .filter(|p| (p.z - mean).norm() <= 1e-12 * scale.max(1.0))
        .count();
    if coincident >= 2 || scale == 0.0 {
        return Err(Error::DegenerateSpread);
    }
    let mut keyed: Vec<(f64, f64, BoundaryPoint)> = points
        .iter()
        .map(|p| {
            let v = p.z - mean;
            (linalg::angle_0_2pi(&v), v.norm(), p.clone())
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.total_cmp(&b.1)));
    Ok((keyed.into_iter().map(|k| k.2).collect(), mean))
}

/// Determines which ellipse's boundary forms the arc from `prev` to `next`.
pub fn identify_arc(
    ellipses: &[EllipseAffine],
    active: &[usize],
    prev: &BoundaryPoint,
    next: &BoundaryPoint,
    arc_index: usize,
) -> Result<usize> {
    let candidates: Vec<usize> = prev
        .owners
        .iter()
        .copied()
        .filter(|k| next.has_owner(*k) && active.contains(k))
        .collect();
    match candidates.len() {
        0 => return Err(Error::NoCommonOwner { arc: arc_index }),
        1 => return Ok(candidates[0]),
        _ => {}
    }
    let mut passing = Vec::new();
    for &k in &candidates {
        let e = &ellipses[k];
        let t1 = e.angle_of(&prev.z);
        let t2 = e.angle_of(&next.z);
        let mid = e.point_at_angle(t1 + 0.5 * linalg::ccw_span(t1, t2));
        if active.iter().all(|&j| ellipses[j].contains(&mid, TOL_ON)) {
            passing.push(k);
        }
    }
    match passing.len() {
        1 => Ok(passing[0]),
        0 => Err(Error::UnresolvedArc { arc: arc_index }),
        _ => Err(Error::AmbiguousArc { arc: arc_index }),
    }
}

/// Interior points of `arc` at density `m`, excluding the endpoints.
pub fn arc_points(arc: &ArcSegment, owner: &EllipseAffine, m: usize) -> Vec<Vec2> {
    arc_points_subdivided(arc, owner, arc.interior_count(m) + 1)
}

/// Splits the arc into `subdivisions` equal disk-angle pieces and returns the
/// `subdivisions − 1` interior division points in counter-clockwise order.
pub fn arc_points_subdivided(arc: &ArcSegment, owner: &EllipseAffine, subdivisions: usize) -> Vec<Vec2> {
    let span = arc.span();
    let s = subdivisions.max(1);
    (1..s)
        .map(|k| owner.point_at_angle(arc.theta1 + span * k as f64 / s as f64))
        .collect()
}

/// The ordered corner points and the arcs joining consecutive ones.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcWalk {
    pub mean: Vec2,
    pub points: Vec<BoundaryPoint>,
    /// `arcs[i]` runs from `points[i]` to `points[(i + 1) % n]`.
    pub arcs: Vec<ArcSegment>,
}

pub fn walk_arcs(ellipses: &[EllipseAffine], reduction: &Reduction, level: usize) -> Result<ArcWalk> {
    let active = &reduction.active;
    if reduction.points.is_empty() && active.len() > 1 {
        return Err(Error::InvalidInput(
            "several bounding ellipses but no corner points".into(),
        ));
    }
    let (points, mean) = order_points(&reduction.points)?;
    if !active.iter().all(|&k| ellipses[k].contains(&mean, TOL_ON)) {
        return Err(Error::MeanNotInterior);
    }
    let n = points.len();
    let mut arcs = Vec::with_capacity(n);
    for i in 0..n {
        let prev = &points[i];
        let next = &points[(i + 1) % n];
        let owner = identify_arc(ellipses, active, prev, next, i)?;
        arcs.push(ArcSegment::new(&ellipses[owner], owner, prev.clone(), next.clone(), level));
    }
    Ok(ArcWalk { mean, points, arcs })
}
