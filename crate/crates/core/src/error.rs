use thiserror::Error;

pub type GeomResult<T> = Result<T, GeomError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("jet of order {requested} unavailable (maximum {max})")]
    JetOrderUnavailable { requested: usize, max: usize },

    #[error("metric entry {index} is not positive ({value})")]
    NonPositiveMetric { index: usize, value: f64 },

    #[error("metric is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },

    #[error("parameter `{name}` must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("degenerate 3-form: bilinear form has rank {rank} < 7")]
    DegenerateForm { rank: usize },

    #[error("{check}: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    ResidualExceeded {
        check: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("point outside profile domain: {0}")]
    OutsideDomain(String),

    #[error("chart bound violated: {0}")]
    ChartBound(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("quadrature did not converge (estimated error {error:.3e})")]
    QuadratureFailed { error: f64 },
}
