//! Outer-bounding ellipses for the intersection of planar ellipses.
//!
//! The boundary of the intersection is split into elliptic arcs between the
//! pairwise crossing points. Tangent lines at points along those arcs form a
//! convex polygon that contains the intersection, and the minimum-area ellipse
//! through the polygon's vertices is the bound.
//!
//! ```
//! use ellipse_bound::conic::EllipseAffine;
//! use ellipse_bound::linalg::Vec2;
//! use ellipse_bound::pipeline::bound_intersection;
//!
//! let lens = [
//!     EllipseAffine::disk(Vec2::new(-0.5, 0.0), 1.0).unwrap(),
//!     EllipseAffine::disk(Vec2::new(0.5, 0.0), 1.0).unwrap(),
//! ];
//! let r = bound_intersection(&lens, 16, 1e-7).unwrap();
//! assert!(r.area() < std::f64::consts::PI);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arc;
pub mod baseline;
pub mod conic;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod intersect;
pub mod linalg;
pub mod mvee;
pub mod pipeline;
pub mod polygon;
pub mod roots;
pub mod sampling;
pub mod scenario;
pub mod svg;

pub use error::{Error, Result};
