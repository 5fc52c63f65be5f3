use std::path::PathBuf;

/// Failure categories; the CLI maps them onto exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("unknown preset `{name}` (available: {available})")]
    UnknownPreset { name: String, available: String },

    #[error("empty internal basis for j_max = {j_max}, M = {m_total}")]
    EmptyBasis { j_max: u32, m_total: i32 },

    #[error("basis dimension {dim} exceeds cap {cap}; raise `dimension_cap` or lower n_max/j_max")]
    DimensionCap { dim: usize, cap: usize },

    #[error("quadrature did not converge: worst entry ({n}, {n_prime}) error {achieved:e} > {requested:e}")]
    Quadrature {
        n: usize,
        n_prime: usize,
        achieved: f64,
        requested: f64,
    },

    #[error("eigensolver failed on {dim}x{dim} matrix: {reason}")]
    Eigensolver { dim: usize, reason: String },

    #[error("propagation aborted at t = {time:e} s: {reason}")]
    Propagation { time: f64, reason: String },

    #[error("t = {t:e} s outside pulse window [0, {tau:e}]")]
    OutsidePulse { t: f64, tau: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn invalid(field: &str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation { .. }
                | Error::UnknownPreset { .. }
                | Error::EmptyBasis { .. }
                | Error::DimensionCap { .. }
                | Error::OutsidePulse { .. }
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Format { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
