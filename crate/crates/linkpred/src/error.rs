use std::path::PathBuf;

/// Errors produced by ingestion, prediction, fusion and evaluation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed line: {msg}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("node identifier collision: {0:?}")]
    NodeCollision(String),

    #[error("dataset format error in {path}: {msg}")]
    DatasetFormat { path: PathBuf, msg: String },

    #[error("{what} out of range: got {got}, valid range is 0..{max}")]
    OutOfRange {
        what: &'static str,
        got: usize,
        max: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degree filter at threshold {threshold} removed every node")]
    EmptyFilterResult { threshold: usize },

    #[error("cannot normalize an empty score map")]
    EmptyScores,

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("evaluation failed at alpha={alpha}, t={t}: {source}")]
    EvalContext {
        alpha: f64,
        t: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("synthetic spec infeasible: {0}")]
    SyntheticInfeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wrap an evaluation error with the (alpha, t) grid position it occurred at.
    pub(crate) fn at(self, alpha: f64, t: usize) -> Self {
        Error::EvalContext {
            alpha,
            t,
            source: Box::new(self),
        }
    }
}
