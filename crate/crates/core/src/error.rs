use thiserror::Error;

use crate::bounds::{FeasibleInterval, Variant};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimension {dim} exceeds the maximum of {max}")]
    Size { dim: usize, max: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("hypotheses of {variant} not satisfied: {detail}")]
    Precondition {
        variant: Variant,
        detail: String,
        interval: Option<FeasibleInterval>,
    },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
