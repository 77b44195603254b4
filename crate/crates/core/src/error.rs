use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix is not symmetric (relative asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("ellipse condition number {condition:e} exceeds the accepted maximum")]
    IllConditioned { condition: f64 },

    #[error("quadratic form describes an empty set (bᵀA⁻¹b − c = {margin:e})")]
    EmptyEllipse { margin: f64 },

    #[error("point is not on the ellipse boundary (residual {residual:e})")]
    NotOnBoundary { residual: f64 },

    #[error("ellipses {0} and {1} coincide")]
    CoincidentEllipses(usize, usize),

    #[error("the intersection of the ellipses is empty or has no interior")]
    EmptyIntersection,

    #[error("boundary points coincide with their mean; cannot order them by angle")]
    DegenerateSpread,

    #[error("mean of the boundary points lies outside the feasible region")]
    MeanNotInterior,

    #[error("no common owner ellipse for boundary arc {arc}")]
    NoCommonOwner { arc: usize },

    #[error("more than one ellipse bounds arc {arc}")]
    AmbiguousArc { arc: usize },

    #[error("no candidate ellipse bounds arc {arc}")]
    UnresolvedArc { arc: usize },

    #[error("tangent lines are parallel")]
    ParallelLines,

    #[error("half-plane intersection is unbounded")]
    Unbounded,

    #[error("half-plane intersection is empty")]
    EmptyPolygon,

    #[error("point set is collinear")]
    CollinearInput,

    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("solver did not converge after {iterations} iterations (gap {gap:e})")]
    NoConvergence { iterations: usize, gap: f64 },

    #[error("degeneracy repair budget exceeded on arc {arc}")]
    RepairBudgetExceeded { arc: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
