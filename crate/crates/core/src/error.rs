use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("direction between coincident points is undefined")]
    DegenerateDirection,
    #[error("sensor field must contain at least one sensor")]
    EmptyField,
    #[error("coincident nodes: path gain and phase are singular")]
    Singularity,
    #[error("element index ({kx}, {ky}) outside a {max_x}x{max_y} grid")]
    Index {
        kx: usize,
        ky: usize,
        max_x: usize,
        max_y: usize,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    Shape(f64),
    #[error("effective channel is identically zero")]
    ZeroChannel,
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
