use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An adaptive quadrature or series ran into its refinement limit.
    #[error("no convergence in {stage}: {detail}")]
    NonConvergence { stage: &'static str, detail: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn no_convergence(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence {
            stage,
            detail: detail.into(),
        }
    }
}
