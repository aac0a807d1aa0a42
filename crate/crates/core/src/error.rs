use thiserror::Error;

/// Errors raised by constructions, analyses and verification runs.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-positive scale {0}")]
    NonPositiveScale(String),

    #[error("direction is not a unit vector (norm {norm})")]
    NonUnitDirection { norm: f64 },

    #[error("shape has zero measure")]
    ZeroMeasure,

    #[error("shape is not convex")]
    NonConvex,

    #[error("window exceeded: query needs [{need_lo}, {need_hi}] but window is [{window_lo}, {window_hi}]")]
    WindowExceeded {
        need_lo: f64,
        need_hi: f64,
        window_lo: f64,
        window_hi: f64,
    },

    #[error("resolution {rho} is not below the least semigroup element {min_g}")]
    InfeasibleResolution { rho: String, min_g: String },

    #[error("profile is identically zero")]
    ZeroProfile,

    #[error("growth certificate failed: fitted slope {slope} exceeds bound {bound}")]
    GrowthCertificate { slope: f64, bound: f64 },

    #[error("no admissible direction set found after {candidates} candidates")]
    NoAdmissibleDirections { candidates: usize },

    #[error("divisibility violated at level {level}: {detail}")]
    Divisibility { level: usize, detail: String },

    #[error("copy count requires b < d (b = {b}, d = {d})")]
    CopyCount { b: f64, d: usize },

    #[error("search budget exhausted (densest grid {grid}x{grid})")]
    SearchExhausted { grid: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
