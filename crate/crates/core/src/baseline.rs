//! Discretize-and-reject baseline.
//!
//! Every ellipse is sampled at `m` uniform disk angles starting from phase 0.
//! Samples outside any other ellipse are dropped, the tangent half-planes at
//! the survivors are intersected, and the minimum ellipse of the resulting
//! polygon is returned. Nothing prevents the half-plane set from being
//! unbounded, which is reported as a [`DegenerateOutcome`].

use std::f64::consts::TAU;

use crate::conic::{EllipseAffine, TOL_ON};
use crate::error::{Error, Result};
use crate::intersect::reduce_and_collect;
use crate::linalg::Vec2;
use crate::mvee::{mvee_points, MveeSolution};
use crate::polygon::{intersect_half_planes, BoundingPolygon};

#[derive(Debug, Clone, PartialEq)]
pub enum DegenerateOutcome {
    /// Fewer than three samples survived the rejection step.
    TooFewPoints { kept: usize },
    Unbounded,
    EmptyPolygon,
    /// The polygon was too thin for the ellipse solver.
    Solver(Error),
}

impl std::fmt::Display for DegenerateOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::TooFewPoints { kept } => write!(f, "only {kept} sample points kept"),
            Self::Unbounded => f.write_str("half-plane intersection is unbounded"),
            Self::EmptyPolygon => f.write_str("half-plane intersection is empty"),
            Self::Solver(e) => write!(f, "ellipse solver failed: {e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaselineOutcome {
    Bounded {
        polygon: BoundingPolygon,
        solution: MveeSolution,
    },
    Degenerate(DegenerateOutcome),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineReport {
    pub outcome: BaselineOutcome,
    /// Surviving samples per input ellipse.
    pub kept_points: Vec<usize>,
    pub kept: Vec<Vec2>,
}

impl BaselineReport {
    pub fn ellipse(&self) -> Option<&EllipseAffine> {
        match &self.outcome {
            BaselineOutcome::Bounded { solution, .. } => Some(&solution.ellipse),
            BaselineOutcome::Degenerate(_) => None,
        }
    }

    pub fn polygon(&self) -> Option<&BoundingPolygon> {
        match &self.outcome {
            BaselineOutcome::Bounded { polygon, .. } => Some(polygon),
            BaselineOutcome::Degenerate(_) => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self.outcome, BaselineOutcome::Degenerate(_))
    }
}

pub fn ywcc16(ellipses: &[EllipseAffine], m: usize, eps: f64) -> Result<BaselineReport> {
    if m < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 samples per ellipse, got {m}")));
    }
    // Fails with EmptyIntersection before any sampling.
    reduce_and_collect(ellipses)?;

    let mut kept_points = vec![0; ellipses.len()];
    let mut kept = Vec::new();
    let mut planes = Vec::new();
    for (k, e) in ellipses.iter().enumerate() {
        for j in 0..m {
            let z = e.point_at_angle(TAU * j as f64 / m as f64);
            if ellipses
                .iter()
                .enumerate()
                .all(|(i, o)| i == k || o.contains(&z, TOL_ON))
            {
                kept_points[k] += 1;
                kept.push(z);
                planes.push(e.tangent_unchecked(&z));
            }
        }
    }

    let degenerate = |d| {
        Ok(BaselineReport {
            outcome: BaselineOutcome::Degenerate(d),
            kept_points: kept_points.clone(),
            kept: kept.clone(),
        })
    };
    if kept.len() < 3 {
        return degenerate(DegenerateOutcome::TooFewPoints { kept: kept.len() });
    }
    let polygon = match intersect_half_planes(&planes) {
        Ok(p) => p,
        Err(Error::Unbounded) => return degenerate(DegenerateOutcome::Unbounded),
        Err(Error::EmptyPolygon) => return degenerate(DegenerateOutcome::EmptyPolygon),
        Err(e) => return Err(e),
    };
    let solution = match mvee_points(&polygon.vertices, eps) {
        Ok(s) => s,
        Err(e @ (Error::CollinearInput | Error::TooFewPoints { .. })) => {
            return degenerate(DegenerateOutcome::Solver(e))
        }
        Err(e) => return Err(e),
    };
    Ok(BaselineReport {
        outcome: BaselineOutcome::Bounded { polygon, solution },
        kept_points,
        kept,
    })
}
