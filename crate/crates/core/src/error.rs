use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("key length must be at least 1")]
    ZeroLength,

    #[error("length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("{value} has no inverse modulo {modulus}")]
    NotInvertible { value: String, modulus: String },

    #[error("ciphertext is not a subset sum of this key (residue {residue})")]
    DecryptionFailure { residue: String },

    #[error("degenerate public key: {0}")]
    DegenerateKey(&'static str),

    #[error("invalid key material: {0}")]
    InvalidKey(String),

    #[error("crossover cut out of range: {0}")]
    CutOutOfRange(String),

    #[error("lattice basis rows are linearly dependent")]
    DependentBasis,

    #[error("invalid lattice basis: {0}")]
    InvalidBasis(String),

    #[error("time limit reached")]
    DeadlineExceeded,

    #[error("statistics requested over an empty sample")]
    EmptySample,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("target unreachable after {attempts} attempts: {detail}")]
    TargetUnreachable { attempts: usize, detail: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by the caller's input rather than the environment.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Csv(_))
    }
}
