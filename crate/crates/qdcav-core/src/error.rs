use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericalError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("adaptive quadrature stalled near {at}")]
    QuadratureStalled { at: f64 },
    #[error("root refinement did not converge in [{lo}, {hi}]")]
    RootNotConverged { lo: f64, hi: f64 },
    #[error("linear solve failed: {0}")]
    Singular(&'static str),
    #[error("no stationary regime by t = {t_max} (relative drift {drift:e})")]
    NonConvergence { t_max: f64, drift: f64 },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("divergent integral: {0}")]
    DivergentIntegral(&'static str),
    #[error("unsupported parameters: {0}")]
    UnsupportedParams(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("Hilbert space dimension {dim} exceeds the limit {limit}")]
    DimensionOverflow { dim: usize, limit: usize },
    #[error(transparent)]
    Numerical(#[from] NumericalError),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
