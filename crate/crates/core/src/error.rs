use thiserror::Error;

use crate::model::ItemId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no realization in the prior support is consistent with the observation")]
    InconsistentObservation,

    #[error("item {0} has already been observed")]
    AlreadyObserved(ItemId),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),

    #[error("the observed items do not form an independent set")]
    InfeasibleBase,

    #[error("ground set of {n} items exceeds the limit of {max}")]
    GroundSetTooLarge { n: usize, max: usize },

    #[error("search space too large: estimated {estimate} exceeds cap {cap}")]
    SearchSpaceTooLarge { estimate: u64, cap: u64 },

    #[error("prior support of {size} realizations exceeds cap {cap}")]
    SupportTooLarge { size: u128, cap: usize },

    #[error("eps must lie in (0, 1), got {0}")]
    InvalidEps(f64),

    #[error("beta must lie in (0, 1), got {0}")]
    InvalidBeta(f64),

    #[error("q must lie in [0, 1], got {0}")]
    InvalidQ(f64),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("hypothesis space is empty")]
    EmptyHypothesisSpace,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Resource-cap failures (as opposed to malformed input).
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::SearchSpaceTooLarge { .. }
                | Error::SupportTooLarge { .. }
                | Error::GroundSetTooLarge { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
