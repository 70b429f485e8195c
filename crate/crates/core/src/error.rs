use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition (bad index, shape mismatch).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("singular beam geometry (condition number of HᵀH = {condition:.3e})")]
    SingularGeometry { condition: f64 },

    /// API misuse such as calling `backward` before `forward`.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("training set is empty")]
    EmptyDataset,

    #[error("training diverged at epoch {epoch}: non-finite loss")]
    Divergence { epoch: usize },

    #[error("data error: {0}")]
    Data(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    /// Metric is undefined for the input (e.g. R² of a constant signal).
    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
