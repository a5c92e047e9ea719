use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FiberError {
    #[error("invalid spin label j = {0}: must be a positive half-integer")]
    InvalidSpin(f64),

    #[error("invalid magnetic quantum number m = {m} for j = {j}")]
    InvalidMagneticNumber { m: f64, j: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not skew-Hermitian (max |A + A^H| = {deviation:e})")]
    NotSkewHermitian { deviation: f64 },

    #[error("{what}: zero vector")]
    ZeroVector { what: &'static str },

    #[error("{what}: expected a unit vector, got norm {norm}")]
    NonUnitVector { what: &'static str, norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("time {t} exceeds the path domain [0, {domain}]")]
    DomainExceeded { t: f64, domain: f64 },

    #[error("degenerate tangent at t = {t} (|dr/dt| = {speed:e})")]
    DegenerateTangent { t: f64, speed: f64 },

    #[error("traversal is not constant-speed at t = {t} (|dr/ds| = {ds_norm})")]
    NonUniformSpeed { t: f64, ds_norm: f64 },

    #[error("pole passage at t = {t}: azimuth is undefined mid-trajectory")]
    PolePassage { t: f64 },

    #[error("invalid track: {0}")]
    InvalidTrack(String),

    #[error("{field}: {message}")]
    Validation { field: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl FiberError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        FiberError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl FiberError {
    /// Process exit code for the CLI: 4 for pole passage, 2 for invalid
    /// input, 1 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            FiberError::PolePassage { .. } => 4,
            FiberError::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for FiberError {
    fn from(e: std::io::Error) -> Self {
        FiberError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FiberError>;
