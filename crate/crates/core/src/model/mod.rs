//! Items, states, realizations, priors, utilities and the two marginal
//! operators.

mod descriptor;
mod ids;
mod instance;
mod realization;
mod utility;

pub use descriptor::{CoverOutcome, TableRow, UtilityDescriptor};
pub use ids::{ItemId, ItemSet, State, MAX_ITEMS};
pub use instance::{Evaluation, Instance, Posterior, StateClass};
pub use realization::{
    consistent, subrealization, PartialRealization, Prior, Realization, PROB_SUM_SLACK,
};
pub use utility::{FnUtility, RealizationRef, TableUtility, UtilityModel, MAX_TABLE_ITEMS};
