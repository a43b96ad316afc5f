use std::path::PathBuf;

use crate::subset::Subset;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("subset {0} appears more than once")]
    DuplicateSubset(Subset),
    #[error("collection is not downward closed: {missing} is missing (subset of {of})")]
    NotDownwardClosed { missing: Subset, of: Subset },
    #[error("element {element} is outside the ground set of size {n}")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("malformed subset {0:?}")]
    BadSubset(String),
    #[error("log-weight of {0} is not finite")]
    NonFiniteWeight(Subset),
    #[error("fill log-weight must be finite")]
    NonFiniteFill,
    #[error("ground set of {n} elements exceeds the limit of {limit}")]
    GroundSetTooLarge { n: usize, limit: usize },
    #[error("tolerance {0} is outside the permitted range")]
    InvalidTolerance(f64),
    #[error("draw value {u} is outside (0, {total}]")]
    OutOfRange { u: f64, total: f64 },
    #[error("subset size {size} is outside 0..={n}")]
    SizeOutOfRange { size: usize, n: usize },
    #[error("distribution sums to {0}, not 1")]
    NotNormalized(f64),
    #[error("invalid generator parameters: {0}")]
    InvalidSpec(String),
    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),
    #[error("manifest mismatch: {0}")]
    ManifestMismatch(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("result check failed: {0}")]
    ValidationFailed(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
