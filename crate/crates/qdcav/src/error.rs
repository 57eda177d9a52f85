use std::path::{Path, PathBuf};

use qdcav_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(String),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

impl ConfigError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Field { field: field.into(), message: message.into() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("config error{}: {source}", path.as_ref().map(|p| format!(" in {}", p.display())).unwrap_or_default())]
    Config {
        path: Option<PathBuf>,
        #[source]
        source: ConfigError,
    },
    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: CoreError,
    },
    #[error("validity condition violated: g = {g} >= delta_ph = {delta_ph}")]
    Validity { g: f64, delta_ph: f64 },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("oracle check failed: {0}")]
    OracleMismatch(String),
}

impl From<ConfigError> for AppError {
    fn from(source: ConfigError) -> Self {
        AppError::Config { path: None, source }
    }
}

impl AppError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        AppError::Io { path: path.to_path_buf(), source }
    }

    /// Parameter-level rejections from the core count as config errors.
    pub fn core(context: impl Into<String>, source: CoreError) -> Self {
        match source {
            CoreError::InvalidModel(m) | CoreError::UnsupportedParams(m) => {
                AppError::Config { path: None, source: ConfigError::field(context.into(), m) }
            }
            source => AppError::Numerical { context: context.into(), source },
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config { .. } | AppError::Io { .. } => 2,
            AppError::Numerical { .. } | AppError::OracleMismatch(_) => 3,
            AppError::Validity { .. } => 4,
        }
    }
}
