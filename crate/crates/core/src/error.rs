use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("spectrum cannot be factorized: {0}")]
    NonFactorizable(String),

    #[error("length mismatch: expected {expected}, got {actual} ({what})")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("no index-modulation capacity: N_s = {n_s}, L_c = {l_c} leaves {n_b} location bits")]
    NoImCapacity { n_s: usize, l_c: usize, n_b: i64 },

    #[error("location {0} is not an allowed pilot position")]
    NotAPilotLocation(usize),

    #[error("correlation lag {delta} out of range (max {max})")]
    LagOutOfRange { delta: usize, max: usize },

    #[error("local window around lag {0} has zero width")]
    ZeroWidthWindow(usize),

    #[error("pilot matrix T·V is rank deficient (condition number {0:e})")]
    RankDeficient(f64),

    #[error("exhaustive search over {candidates} sequences exceeds the limit {limit}; use the relaxed search")]
    SearchSpaceTooLarge { candidates: f64, limit: u64 },

    #[error("no pilot design survived the relaxed search")]
    SearchFailed,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
