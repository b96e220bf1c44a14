use thiserror::Error;

/// Failures raised while building or querying a [`crate::geometry::Domain`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("a ring needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("expected {expected} edge labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("expected {expected} normals, got {got}")]
    NormalCount { expected: usize, got: usize },
    #[error("normal {index} has length {length}, expected a unit vector")]
    NonUnitNormal { index: usize, length: f64 },
    #[error("normal {index} points into the domain")]
    InwardNormal { index: usize },
    #[error("non-finite coordinate at vertex {0}")]
    NonFinite(usize),
    #[error("zero-length edge at vertex {0}")]
    DegenerateEdge(usize),
    #[error("self-intersection between edges {first} and {second}")]
    SelfIntersection { first: usize, second: usize },
    #[error("polygon encloses zero area")]
    ZeroArea,
    #[error("hole {0} is not contained in the outer boundary")]
    HoleOutside(usize),
    #[error("domain has no origin; radial queries need one")]
    MissingOrigin,
    #[error("domain is not convex")]
    NotConvex,
}

/// Failures of the radial/one-dimensional eigenvalue machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error("exponent p = {0} is outside (1, inf)")]
    InvalidExponent(f64),
    #[error("invalid radial problem: {0}")]
    InvalidProblem(String),
    #[error("shooting produced a non-finite state at lambda = {lambda}")]
    NonFinite { lambda: f64 },
    #[error("no sign change of the shooting mismatch below lambda = {ceiling}")]
    BracketNotFound { ceiling: f64 },
    #[error("discrete radial solver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
}

/// Failures of the grid oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("grid spacing {h} is too coarse for a domain of diameter {diameter}")]
    SpacingTooCoarse { h: f64, diameter: f64 },
    #[error("only {0} interior nodes; refine the grid")]
    Resolution(usize),
    #[error("eigen-iteration did not converge after {iterations} iterations (last estimate {value})")]
    NoConvergence { iterations: usize, value: f64 },
    #[error("minimizer stagnated at step floor after {iterations} iterations (last value {value})")]
    Stagnation { iterations: usize, value: f64 },
    #[error("sample ({x}, {y}) lies outside the support of the field")]
    OutsideSupport { x: f64, y: f64 },
    #[error("field does not match the grid ({0})")]
    FieldMismatch(String),
}

/// Top-level error for the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
