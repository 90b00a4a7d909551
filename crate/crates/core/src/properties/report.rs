use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Evaluation, Instance, ItemId, ItemSet, PartialRealization, State};
use crate::policies::Rule;

/// A structural property the approximation guarantees rely on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    WcSubmodular,
    WcMonotone,
    AdaptiveSubmodular,
    AdaptiveMonotone,
    Pointwise,
    MinimalDependency,
    StateSetStability,
    Prop2Implication,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::WcSubmodular,
        Property::WcMonotone,
        Property::AdaptiveSubmodular,
        Property::AdaptiveMonotone,
        Property::Pointwise,
        Property::MinimalDependency,
        Property::StateSetStability,
        Property::Prop2Implication,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::WcSubmodular => "wc-submodular",
            Property::WcMonotone => "wc-monotone",
            Property::AdaptiveSubmodular => "adaptive-submodular",
            Property::AdaptiveMonotone => "adaptive-monotone",
            Property::Pointwise => "pointwise",
            Property::MinimalDependency => "minimal-dependency",
            Property::StateSetStability => "state-set-stability",
            Property::Prop2Implication => "prop2-implication",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown property '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

/// A concrete counterexample to a property.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// `marginal(item | psi) < marginal(item | psi_prime) − tol` with
    /// `psi ⊆ psi_prime`.
    Submodularity {
        rule: Rule,
        psi: PartialRealization,
        psi_prime: PartialRealization,
        item: ItemId,
        at_psi: f64,
        at_psi_prime: f64,
    },
    /// `marginal(item | psi) < −tol`.
    Monotonicity {
        rule: Rule,
        psi: PartialRealization,
        item: ItemId,
        value: f64,
    },
    /// `f(·, φ)` gains more from `item` on top of `larger` than of `smaller`.
    PointwiseSubmodularity {
        realization: usize,
        smaller: ItemSet,
        larger: ItemSet,
        item: ItemId,
        gain_smaller: f64,
        gain_larger: f64,
    },
    /// `f(set ∪ {item}, φ) < f(set, φ) − tol`.
    PointwiseMonotonicity {
        realization: usize,
        set: ItemSet,
        item: ItemId,
        gain: f64,
    },
    /// Two realizations consistent with `psi` disagree on `f(dom ψ, ·)`.
    MinimalDependency {
        psi: PartialRealization,
        realizations: (usize, usize),
        values: (f64, f64),
    },
    /// `O(item, psi) ≠ O(item, ∅)`.
    StateSet {
        psi: PartialRealization,
        item: ItemId,
        states: Vec<State>,
        prior_states: Vec<State>,
    },
    /// All premises held but these conclusions failed.
    Implication { failed: Vec<Property> },
}

impl Witness {
    /// Recomputes the violation from scratch through the model operations,
    /// with exact conditional evaluation.
    pub fn reverify(&self, inst: &Instance, tol: f64) -> Result<bool> {
        let inst = inst.with_evaluation(Evaluation::Exact);
        let marginal = |rule: Rule, e: ItemId, psi: &PartialRealization| match rule {
            Rule::WorstCase => inst.wc_marginal(e, psi),
            Rule::Average => inst.avg_marginal(e, psi),
        };
        Ok(match self {
            Witness::Submodularity {
                rule,
                psi,
                psi_prime,
                item,
                ..
            } => {
                psi.is_subrealization_of(psi_prime)
                    && marginal(*rule, *item, psi)? < marginal(*rule, *item, psi_prime)? - tol
            }
            Witness::Monotonicity { rule, psi, item, .. } => marginal(*rule, *item, psi)? < -tol,
            Witness::PointwiseSubmodularity {
                realization,
                smaller,
                larger,
                item,
                ..
            } => {
                let f = |s: ItemSet| inst.value(s, *realization);
                smaller.is_subset(*larger)
                    && !larger.contains(*item)
                    && f(smaller.with(*item)) - f(*smaller)
                        < f(larger.with(*item)) - f(*larger) - tol
            }
            Witness::PointwiseMonotonicity {
                realization,
                set,
                item,
                ..
            } => inst.value(set.with(*item), *realization) < inst.value(*set, *realization) - tol,
            Witness::MinimalDependency {
                psi,
                realizations: (a, b),
                ..
            } => {
                let prior = inst.prior();
                prior.realization(*a).is_consistent_with(psi)
                    && prior.realization(*b).is_consistent_with(psi)
                    && (inst.value(psi.dom(), *a) - inst.value(psi.dom(), *b)).abs() > tol
            }
            Witness::StateSet { psi, item, .. } => {
                inst.possible_states(*item, psi)?
                    != inst.possible_states(*item, &PartialRealization::new())?
            }
            Witness::Implication { .. } => true,
        })
    }
}

/// Outcome of one property check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: Property,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Size of the quantifier domain that was swept.
    pub checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PropertyReport {
    pub(crate) fn from_search(property: Property, witness: Option<Witness>, checked: u64) -> Self {
        PropertyReport {
            property,
            status: if witness.is_some() {
                Status::Fail
            } else {
                Status::Pass
            },
            witness,
            checked,
            note: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}
