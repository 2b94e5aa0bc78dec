use thiserror::Error;

/// Errors from the linear-algebra and LP substrate.
#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("matrix is singular (determinant below threshold)")]
    Singular,
    #[error("non-finite entry {0} rejected")]
    NonFinite(f64),
    #[error("index error: {0}")]
    Index(String),
    #[error("numerical error: {0}")]
    Numerical(String),
}

/// Errors from network construction and validation.
#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("network is not open: (I - P') is singular")]
    OpenNetwork,
    #[error("invalid network: {0}")]
    Invalid(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Errors from ratio-vector construction and polytope coordinates.
#[derive(Debug, Error)]
pub enum RatioError {
    #[error("corner spec error: {0}")]
    Spec(String),
    #[error("invalid ratio vector: {0}")]
    Invalid(String),
    #[error("point outside the ratio polytope: pinned delta for station {station} is {value}")]
    OutOfPolytope { station: usize, value: f64 },
    #[error("dimension error: {0}")]
    Dimension(String),
}

/// Errors from the reflection module.
#[derive(Debug, Error)]
pub enum ReflectionError {
    #[error("ratio vectors are not neighbors")]
    NotNeighbors,
    #[error("reflection matrix is singular")]
    Singular,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Ratio(#[from] RatioError),
}

/// Errors from the simulators.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("step error: {0}")]
    Step(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("no complementary reflection found on the boundary (R may not be completely-S)")]
    NoReflection,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
