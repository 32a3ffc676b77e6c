use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient samples: need {needed}, signal has {available}")]
    InsufficientSamples { needed: usize, available: usize },

    #[error("mode {mode} has {got} residues but the signal has {looks} looks")]
    ResidueMismatch { mode: usize, got: usize, looks: usize },

    #[error("signal is identically zero")]
    ZeroSignal,

    #[error("matrix is identically zero")]
    ZeroMatrix,

    #[error("||B||_F = {0} < 1, the Frobenius disk is undefined")]
    FrobeniusBelowOne(f64),

    #[error("pencil is not scaled: ||B||_2 = {0} < 1")]
    Unscaled(f64),

    #[error("B has numerical rank {rank} < {cols} columns")]
    RankDeficient { rank: usize, cols: usize },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("schema error in {context}: {message}")]
    Schema { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn schema(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            context: context.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
