use thiserror::Error;

/// Errors raised by the geometry kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("polygon needs at least 3 vertices, got {count}")]
    TooFewVertices { count: usize },
    #[error("vertex sequence is not strictly convex at vertex {index}")]
    NotConvex { index: usize },
    #[error("origin is not strictly interior (edge {edge})")]
    OriginNotInterior { edge: usize },
    #[error("rounding radius must be finite and non-negative, got {0}")]
    InvalidRadius(f64),
    #[error("symplectic scale must be finite and non-zero, got {0}")]
    InvalidScale(f64),
    #[error("ray direction is zero")]
    ZeroDirection,
    #[error("vector is zero")]
    ZeroVector,
    #[error("linear map is singular (det = {det})")]
    SingularMap { det: f64 },
    #[error("dual vertex system is degenerate at edge {edge}")]
    DegenerateSystem { edge: usize },
    #[error("boundary point is a polygon vertex {vertex}; supporting line is not unique")]
    NonSmoothPoint { vertex: usize },
    #[error("direction is parallel to edge {edge}; support point is not unique")]
    SupportNotUnique { edge: usize },
    #[error("hexagon parameter must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("random polygon sampling failed after {attempts} attempts")]
    DegenerateSample { attempts: usize },
    #[error("no sign change of the asymmetry function was found")]
    NoSignChangeFound,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
