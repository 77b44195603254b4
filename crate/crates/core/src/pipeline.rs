//! End-to-end bounding: reduce, walk the boundary, build the tangent polygon
//! with per-arc repair, and fit the minimum ellipse to its vertices.
//!
//! Refinement only ever doubles the subdivision count of an arc, so every
//! later point set contains the earlier one. The tangent polygons are then
//! nested and a previously computed ellipse keeps bounding later polygons.

use std::time::{Duration, Instant};

use crate::arc::{arc_points_subdivided, walk_arcs, ArcWalk};
use crate::conic::EllipseAffine;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::intersect::reduce_and_collect_with;
use crate::linalg::Vec2;
use crate::mvee::{mvee_points, MveeSolution, DEFAULT_EPS};
use crate::polygon::{build_polygon, BoundingPolygon};

pub const DEFAULT_M0: usize = 8;
pub const DEFAULT_AREA_TOL: f64 = 1e-3;
pub const DEFAULT_K_MAX: usize = 12;
/// Doublings allowed on a single arc while repairing degeneracies.
pub const MAX_REPAIR_DOUBLINGS: u32 = 20;
pub const MAX_ELLIPSES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    pub m0: usize,
    pub eps: f64,
    /// Stop once the relative area decrease of one global doubling drops
    /// below this.
    pub area_tol: f64,
    /// Maximum number of solves in [`bound_until_converged`].
    pub k_max: usize,
    pub exec: Execution,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            m0: DEFAULT_M0,
            eps: DEFAULT_EPS,
            area_tol: DEFAULT_AREA_TOL,
            k_max: DEFAULT_K_MAX,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub reduce: Duration,
    pub walk: Duration,
    pub polygon: Duration,
    pub mvee: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.reduce + self.walk + self.polygon + self.mvee
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundingResult {
    pub ellipse: EllipseAffine,
    /// `None` when a single ellipse bounds the region and is returned as is.
    pub polygon: Option<BoundingPolygon>,
    pub solution: Option<MveeSolution>,
    pub walk: Option<ArcWalk>,
    /// Final density per arc, in points per full turn of the owner ellipse.
    pub per_arc_m: Vec<usize>,
    /// Arc doublings spent on degeneracy repair.
    pub repairs: usize,
    /// Reported area after each solve; non-increasing.
    pub area_trace: Vec<f64>,
    /// Area of each fresh solve, before falling back to an earlier ellipse.
    pub raw_trace: Vec<f64>,
    pub timings: StageTimings,
}

impl BoundingResult {
    pub fn area(&self) -> f64 {
        self.ellipse.area()
    }
}

pub fn bound_intersection(ellipses: &[EllipseAffine], m0: usize, eps: f64) -> Result<BoundingResult> {
    let opts = RefineOptions {
        m0,
        eps,
        k_max: 1,
        ..RefineOptions::default()
    };
    bound_until_converged(ellipses, &opts)
}

/// Repeats the bound with every arc's density doubled until the area stops
/// shrinking by more than `area_tol` or `k_max` solves have run.
pub fn bound_until_converged(ellipses: &[EllipseAffine], opts: &RefineOptions) -> Result<BoundingResult> {
    if ellipses.is_empty() || ellipses.len() > MAX_ELLIPSES {
        return Err(Error::InvalidInput(format!(
            "expected 1 to {MAX_ELLIPSES} ellipses, got {}",
            ellipses.len()
        )));
    }
    if opts.m0 == 0 || opts.k_max == 0 {
        return Err(Error::InvalidInput("m0 and k_max must be positive".into()));
    }
    if !(opts.area_tol >= 0.0) {
        return Err(Error::InvalidInput("area_tol must be nonnegative".into()));
    }

    let mut timings = StageTimings::default();
    let t = Instant::now();
    let reduction = reduce_and_collect_with(ellipses, opts.exec)?;
    timings.reduce = t.elapsed();

    if let [only] = reduction.active[..] {
        let ellipse = ellipses[only];
        return Ok(BoundingResult {
            ellipse,
            polygon: None,
            solution: None,
            walk: None,
            per_arc_m: Vec::new(),
            repairs: 0,
            area_trace: vec![ellipse.area()],
            raw_trace: vec![ellipse.area()],
            timings,
        });
    }

    let t = Instant::now();
    let walk = walk_arcs(ellipses, &reduction, opts.m0)?;
    timings.walk = t.elapsed();

    let base: Vec<usize> = walk
        .arcs
        .iter()
        .map(|a| a.interior_count(opts.m0) + 1)
        .collect();
    let mut doublings = vec![0u32; walk.arcs.len()];
    let mut repairs = 0;
    let mut best: Option<(BoundingPolygon, MveeSolution)> = None;
    let mut area_trace = Vec::new();
    let mut raw_trace = Vec::new();

    for round in 0..opts.k_max {
        if round > 0 {
            for d in doublings.iter_mut() {
                *d += 1;
            }
        }

        let t = Instant::now();
        let polygon = loop {
            if let Some(arc) = doublings.iter().position(|&d| d > MAX_REPAIR_DOUBLINGS + round as u32) {
                return Err(Error::RepairBudgetExceeded { arc });
            }
            let pts: Vec<Vec<Vec2>> = opts.exec.map_range(walk.arcs.len(), |i| {
                let arc = &walk.arcs[i];
                arc_points_subdivided(arc, &ellipses[arc.owner], base[i] << doublings[i])
            });
            match build_polygon(ellipses, &walk.arcs, &pts) {
                Ok(p) => break p,
                Err(d) => {
                    doublings[d.arc] += 1;
                    repairs += 1;
                }
            }
        };
        timings.polygon += t.elapsed();

        let t = Instant::now();
        let solution = mvee_points(&polygon.vertices, opts.eps)?;
        timings.mvee += t.elapsed();

        let area = solution.ellipse.area();
        raw_trace.push(area);
        let prev = best.as_ref().map(|(_, s)| s.ellipse.area());
        match prev {
            // The new polygon lies inside the old one, so the old ellipse
            // still bounds it; keep whichever is smaller.
            Some(p) if area >= p => {
                area_trace.push(p);
                best = best.map(|(_, s)| (polygon, s));
            }
            _ => {
                area_trace.push(area);
                best = Some((polygon, solution));
            }
        }
        if let Some(p) = prev {
            let now = *area_trace.last().unwrap();
            if (p - now) / p < opts.area_tol {
                break;
            }
        }
    }

    let (polygon, solution) = best.expect("at least one round");
    let per_arc_m = doublings.iter().map(|&d| opts.m0 << d).collect();
    Ok(BoundingResult {
        ellipse: solution.ellipse,
        polygon: Some(polygon),
        solution: Some(solution),
        walk: Some(walk),
        per_arc_m,
        repairs,
        area_trace,
        raw_trace,
        timings,
    })
}
