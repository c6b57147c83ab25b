use thiserror::Error;

/// Failures raised by the geometric engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point {coords:?} lies outside the chart domain")]
    PointOutOfDomain { coords: Vec<f64> },
    #[error("finite-difference stencil around {coords:?} leaves the chart domain")]
    StencilOutOfDomain { coords: Vec<f64> },
    #[error("metric is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NonPositiveDefinite { min_eigenvalue: f64 },
    #[error("vectors are rank deficient: rank {rank} of {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("vectors do not span a 2-plane (Gram determinant {gram:e})")]
    DegeneratePlane { gram: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid differentiation scheme: {0}")]
    InvalidScheme(String),
    #[error("vector is not unit (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("vector is not orthogonal to xi (eta = {eta:e})")]
    NotOrthogonalToXi { eta: f64 },
    #[error("vector is not vertical (horizontal part {defect:e})")]
    NotVertical { defect: f64 },
    #[error("vector is not horizontal (vertical part {defect:e})")]
    NotHorizontal { defect: f64 },
    #[error("vector is parallel to xi")]
    XiDirection,
    #[error("phi annihilates the vector")]
    ZeroPhi,
    #[error("submersion is not slant: {0}")]
    NotSlant(String),
    #[error("submersion is not proper slant: {0}")]
    NotProperSlant(String),
    #[error("wrong dimensions: {0}")]
    WrongDimensions(String),
    #[error("xi is not vertical")]
    XiNotVertical,
    #[error("xi is not horizontal")]
    XiNotHorizontal,
    #[error("xi position {0} is not admissible for this check")]
    WrongXiPosition(String),
    #[error("horizontal space is not phi(ker F_*) + span(xi): defect {defect:e}")]
    NotAntiInvariant { defect: f64 },
    #[error("almost contact structure is invalid: {0}")]
    StructureInvalid(String),
    #[error("submersion axioms fail: {0}")]
    NotSubmersion(String),
}

impl GeometryError {
    /// Short variant name used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::PointOutOfDomain { .. } => "PointOutOfDomain",
            Self::StencilOutOfDomain { .. } => "StencilOutOfDomain",
            Self::NonPositiveDefinite { .. } => "NonPositiveDefinite",
            Self::RankDeficient { .. } => "RankDeficient",
            Self::DegeneratePlane { .. } => "DegeneratePlane",
            Self::DimensionMismatch { .. } => "DimensionMismatch",
            Self::InvalidScheme(_) => "InvalidScheme",
            Self::NotUnit { .. } => "NotUnit",
            Self::NotOrthogonalToXi { .. } => "NotOrthogonalToXi",
            Self::NotVertical { .. } => "NotVertical",
            Self::NotHorizontal { .. } => "NotHorizontal",
            Self::XiDirection => "XiDirection",
            Self::ZeroPhi => "ZeroPhi",
            Self::NotSlant(_) => "NotSlant",
            Self::NotProperSlant(_) => "NotProperSlant",
            Self::WrongDimensions(_) => "WrongDimensions",
            Self::XiNotVertical => "XiNotVertical",
            Self::XiNotHorizontal => "XiNotHorizontal",
            Self::WrongXiPosition(_) => "WrongXiPosition",
            Self::NotAntiInvariant { .. } => "NotAntiInvariant",
            Self::StructureInvalid(_) => "StructureInvalid",
            Self::NotSubmersion(_) => "NotSubmersion",
        }
    }
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
