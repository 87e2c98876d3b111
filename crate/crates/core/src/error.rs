use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The principal logarithm is undefined at `-I`.
    #[error("group element lies on the cut locus of the principal logarithm (distance {distance:e} from -I)")]
    CutLocus { distance: f64 },

    /// A spectral series cannot be certified below the requested tolerance.
    #[error(
        "heat kernel series at t = {time} with cutoff {cutoff} has tail bound {bound:e} > tolerance {tolerance:e}"
    )]
    Truncation { time: f64, cutoff: usize, bound: f64, tolerance: f64 },

    /// A closed-form Gaussian integral diverges.
    #[error("function is not square integrable against {measure}")]
    NonIntegrable { measure: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("configuration error in field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
