use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid sizes, shapes, parameters or config values.
    #[error("configuration error: {0}")]
    Config(String),

    /// Poisson solve requested on a field with nonzero spatial mean.
    #[error("precondition violated: spatial mean of the Poisson source is {mean:e} (must vanish)")]
    NonzeroMean { mean: f64 },

    /// Reconstructed distribution f = M + g sqrt(M) is negative somewhere.
    #[error("reconstructed distribution is negative: min f = {min:e} at x-node {x_node}, v-node {v_node}")]
    NegativeDistribution {
        min: f64,
        x_node: usize,
        v_node: usize,
    },

    #[error("non-finite value in solution at t = {time}")]
    NonFinite { time: f64 },

    #[error("implicit solve breakdown: zero pivot in Fourier mode {mode}")]
    ZeroPivot { mode: usize },

    #[error("conservation violated at t = {time}: mean drifted from {before:e} to {after:e}")]
    Conservation { time: f64, before: f64, after: f64 },

    #[error("time grids do not match: {0}")]
    TimeGridMismatch(String),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
