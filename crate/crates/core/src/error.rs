use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has numerical rank {rank}, expected at least {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("image set {set} is rank deficient: rank {rank} < d = {expected}")]
    RankDeficientSet {
        set: String,
        rank: usize,
        expected: usize,
    },

    #[error("singular value {value:e} is too small to invert")]
    SingularFactor { value: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no prototype available for {0}")]
    MissingClassPrototype(String),

    #[error("sample is at zero distance from both winners (d+ + d- = {sum:e})")]
    DegenerateSample { sum: f64 },

    #[error("relevance update clipped every component to zero")]
    AllZeroRelevance,

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("bad magic number {found:#010x}, expected {expected:#010x}")]
    BadMagic { found: u32, expected: u32 },

    #[error("file truncated: {0}")]
    TruncatedFile(String),

    #[error("image count {images} does not match label count {labels}")]
    CountMismatch { images: usize, labels: usize },

    #[error("inconsistent image dimensions: {0}")]
    InconsistentDims(String),

    #[error("empty image set: {0}")]
    EmptySet(PathBuf),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("class {label} has {available} images, {required} required")]
    InsufficientImages {
        label: u32,
        available: usize,
        required: usize,
    },

    #[error("model file version {found} is newer than supported version {supported}")]
    VersionMismatch { found: u32, supported: u32 },

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error("model file not found: {0}")]
    ModelNotFound(PathBuf),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable single-word category used in CLI diagnostics.
    pub fn category(&self) -> &'static str {
        match self {
            Error::RankDeficient { .. } | Error::RankDeficientSet { .. } => "RankDeficient",
            Error::SingularFactor { .. } => "SingularFactor",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::InvalidInput(_) => "InvalidInput",
            Error::MissingClassPrototype(_) => "MissingClassPrototype",
            Error::DegenerateSample { .. } => "DegenerateSample",
            Error::AllZeroRelevance => "AllZeroRelevance",
            Error::NonFinite(_) => "NonFinite",
            Error::BadMagic { .. } => "BadMagic",
            Error::TruncatedFile(_) => "TruncatedFile",
            Error::CountMismatch { .. } => "CountMismatch",
            Error::InconsistentDims(_) => "InconsistentDims",
            Error::EmptySet(_) => "EmptySet",
            Error::UnsupportedFormat(_) => "UnsupportedFormat",
            Error::InsufficientImages { .. } => "InsufficientImages",
            Error::VersionMismatch { .. } => "VersionMismatch",
            Error::CorruptModel(_) => "CorruptModel",
            Error::ModelNotFound(_) => "ModelNotFound",
            Error::Config(_) => "ConfigError",
            Error::Usage(_) => "UsageError",
            Error::Io { .. } => "IoError",
        }
    }
}
