//! Exhaustive checks of the structural properties behind the guarantees,
//! each returning either a pass or a re-verifiable witness.

mod checker;
mod report;

pub use checker::{Checker, DEFAULT_PAIR_CAP, DEFAULT_TOLERANCE};
pub use report::{Property, PropertyReport, Status, Witness};

use crate::error::Result;
use crate::model::Instance;

pub fn check_wc_submodular(inst: &Instance) -> Result<PropertyReport> {
    Checker::new(inst).wc_submodular()
}

pub fn check_wc_monotone(inst: &Instance) -> Result<PropertyReport> {
    Checker::new(inst).wc_monotone()
}

pub fn check_adaptive_submodular(inst: &Instance) -> Result<PropertyReport> {
    Checker::new(inst).adaptive_submodular()
}

pub fn check_adaptive_monotone(inst: &Instance) -> Result<PropertyReport> {
    Checker::new(inst).adaptive_monotone()
}

pub fn check_pointwise(inst: &Instance) -> Result<PropertyReport> {
    Checker::new(inst).pointwise()
}

pub fn check_minimal_dependency(inst: &Instance) -> Result<PropertyReport> {
    Checker::new(inst).minimal_dependency()
}

pub fn check_state_set_stability(inst: &Instance) -> Result<PropertyReport> {
    Checker::new(inst).state_set_stability()
}

pub fn check_prop2_implication(inst: &Instance) -> Result<PropertyReport> {
    Checker::new(inst).prop2_implication()
}
