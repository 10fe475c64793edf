use thiserror::Error;

/// Errors raised by the model, identification, simulation and control layers.
#[derive(Debug, Error)]
pub enum MmmError {
    /// The model structure or a parameter set does not match its declaration.
    #[error("structural error: {0}")]
    Structure(String),

    /// The max-magnitude weight matrix has spectral radius >= 1.
    #[error("unstable parameter set: spectral radius {radius:.6} >= 1")]
    Unstable { radius: f64 },

    /// Input data violates a documented precondition.
    #[error("data error: {0}")]
    Data(String),

    /// An optimizer or numerical routine could not produce a finite result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Reading or writing one of the text formats failed.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MmmError>;

impl From<csv::Error> for MmmError {
    fn from(e: csv::Error) -> Self {
        MmmError::Format(e.to_string())
    }
}

impl From<toml::de::Error> for MmmError {
    fn from(e: toml::de::Error) -> Self {
        MmmError::Format(e.to_string())
    }
}

impl From<toml::ser::Error> for MmmError {
    fn from(e: toml::ser::Error) -> Self {
        MmmError::Format(e.to_string())
    }
}
