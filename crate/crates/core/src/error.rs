use thiserror::Error;

/// Errors raised by ingestion, index evaluation, calibration and the
/// reference clusterers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input too small: need at least {needed} objects, got {got}")]
    InputTooSmall { needed: usize, got: usize },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("asymmetric dissimilarity at ({i}, {j}): {a} vs {b}")]
    AsymmetricInput { i: usize, j: usize, a: f64, b: f64 },

    #[error("negative dissimilarity {value} at ({i}, {j})")]
    NegativeDissimilarity { i: usize, j: usize, value: f64 },

    #[error("nonzero diagonal entry {value} at object {i}")]
    BadDiagonal { i: usize, value: f64 },

    #[error("maximum dissimilarity is zero; normalisation undefined")]
    ZeroMaxDissimilarity,

    #[error("no within-cluster pairs: every cluster is a singleton")]
    NoWithinPairs,

    #[error("index requires at least two clusters")]
    RequiresTwoClusters,

    #[error("no cluster has more than {k} members")]
    InsufficientClusterSizes { k: usize },

    #[error("number of clusters {k} outside the allowed range 1..={max}")]
    KOutOfRange { k: usize, max: usize },

    #[error("correlation undefined: one of the pair vectors is constant")]
    DegenerateCorrelation,

    #[error("degenerate calibration for {index}: {reason}")]
    DegenerateCalibration { index: String, reason: String },

    #[error("collection has no random clusterings with K = {0}")]
    KNotInCollection(usize),

    #[error("index {0} missing from calibrated profile")]
    MissingIndex(String),

    #[error("weight for {index} must be positive, got {weight}")]
    BadWeight { index: String, weight: f64 },

    #[error("unknown index id {0:?} (valid: {valid})", valid = crate::indexes::IndexId::valid_list())]
    UnknownIndex(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
