use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("missing column `{0}` in header")]
    MissingColumn(String),

    #[error("row {row}, column `{column}`: cannot parse {value:?}")]
    TypeParse { row: usize, column: String, value: String },

    #[error("file contains no data rows")]
    EmptyFile,

    #[error("dataset failed validation: {0}")]
    InvalidData(String),

    #[error("stratified split impossible: class {0} has no rows")]
    DegenerateClass(u8),

    #[error("unknown product type {0:?} (expected L, M or H)")]
    UnknownCategory(String),

    #[error("minority class has {minority} rows, need more than k = {k}")]
    TooFewMinority { minority: usize, k: usize },

    #[error("k = {k} neighbors requested but only {available} candidates")]
    KTooLarge { k: usize, available: usize },

    #[error("impurity of an empty node is undefined")]
    EmptyNode,

    #[error("training labels contain a single class")]
    DegenerateLabels,

    #[error("covariance of class {class} is singular after regularization")]
    SingularCovariance { class: u8 },

    #[error("expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("ROC analysis needs both classes present")]
    SingleClass,

    #[error("invalid fold count k = {k} for n = {n}")]
    BadK { k: usize, n: usize },

    #[error("bootstrap sample {sample} lost a class after {attempts} draws")]
    DegenerateBootstrap { sample: usize, attempts: usize },

    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid decision matrix: {0}")]
    InvalidDecisionMatrix(String),

    #[error("need at least two models to rank, got {0}")]
    TooFewModels(usize),

    #[error("model `{0}` not found")]
    MissingModel(String),

    #[error("unsupported model document: {0}")]
    ModelFormat(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("repetition {repetition}, fold {fold}: {source}")]
    Fold {
        repetition: usize,
        fold: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short stable identifier for machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "Io",
            Error::Csv(_) => "Csv",
            Error::MissingColumn(_) => "MissingColumn",
            Error::TypeParse { .. } => "TypeParseError",
            Error::EmptyFile => "EmptyFile",
            Error::InvalidData(_) => "InvalidData",
            Error::DegenerateClass(_) => "DegenerateClass",
            Error::UnknownCategory(_) => "UnknownCategory",
            Error::TooFewMinority { .. } => "TooFewMinority",
            Error::KTooLarge { .. } => "KTooLarge",
            Error::EmptyNode => "EmptyNode",
            Error::DegenerateLabels => "DegenerateLabels",
            Error::SingularCovariance { .. } => "SingularCovariance",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::SingleClass => "SingleClass",
            Error::BadK { .. } => "BadK",
            Error::DegenerateBootstrap { .. } => "DegenerateBootstrap",
            Error::InvalidHyperparameter(_) => "InvalidHyperparameter",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::InvalidDecisionMatrix(_) => "InvalidDecisionMatrix",
            Error::TooFewModels(_) => "TooFewModels",
            Error::MissingModel(_) => "MissingModel",
            Error::ModelFormat(_) => "ModelFormat",
            Error::Json(_) => "Json",
            Error::Fold { source, .. } => source.kind(),
        }
    }
}
