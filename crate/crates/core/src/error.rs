use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Bloch vector has norm {0} > 1")]
    InvalidBloch(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(&'static str),
    #[error("coherence factor {0} outside [0, 1]")]
    InvalidCoherence(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("reference visibility |Tr(U_ref rho)| = {0:e} is zero")]
    ReferenceVisibilityZero(f64),
    #[error("path is not closed (endpoint gap {0:e})")]
    NonClosedPath(f64),
    #[error("degenerate fit design: normal matrix is singular")]
    DegenerateDesign,
    #[error("fringe frequency is indeterminate (no significant modulation)")]
    FrequencyIndeterminate,
    #[error("fits use different frequencies ({0} vs {1} rad/V)")]
    MismatchedFrequency(f64, f64),
    #[error("uncertainty at index {0} is not positive")]
    ZeroSigma(usize),
    #[error("no phase sensitivity to purity: all settings have theta1 ~ 0")]
    NoSensitivity,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed file {path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error("dataset is missing {} scan(s): {}", .0.len(), .0.join(", "))]
    PartialDataset(Vec<String>),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
