use std::path::PathBuf;

/// Errors produced by the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("chromosome must have {expected} bits, got {actual}")]
    ChromosomeLength { expected: usize, actual: usize },

    #[error("invalid chromosome character {found:?} at position {position}; expected '0' or '1'")]
    ChromosomeChar { position: usize, found: char },

    #[error("state index {0} out of range; machines have 16 states")]
    StateIndex(usize),

    #[error("cost model requires positive mean and variance (mu = {mu}, sigma2 = {sigma2})")]
    CostDomain { mu: f64, sigma2: f64 },

    #[error("unknown defender policy {0:?}")]
    UnknownDefender(String),

    #[error("unknown suite family {0:?}; expected \"1to1\" or \"2to1\"")]
    UnknownFamily(String),

    #[error("investment bias is undefined when both mean investments are zero")]
    BiasUndefined,

    #[error("cannot select from an empty population")]
    EmptyPopulation,

    #[error("runs disagree on generation count ({expected} vs {actual})")]
    RaggedRuns { expected: usize, actual: usize },

    #[error("invalid configuration field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
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

pub type Result<T, E = Error> = std::result::Result<T, E>;
