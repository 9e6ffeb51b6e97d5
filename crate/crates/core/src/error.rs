use thiserror::Error;

/// Errors produced by the geometry pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("unknown quantity `{0}`")]
    UnknownQuantity(String),

    #[error("direction is not a unit vector (|a|^2 + |b|^2 = {0})")]
    NonUnitDirection(f64),

    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
