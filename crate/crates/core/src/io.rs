//! The `asm-1` instance file format.

use serde::{Deserialize, Serialize};

use crate::applications::{
    build_active_learning, build_sensor_selection, build_stochastic_coverage,
    build_viral_marketing, DiffusionGraph, HypothesisSpace,
};
use crate::error::{Error, Result};
use crate::model::{
    Instance, ItemSet, Prior, Realization, TableUtility, UtilityDescriptor, MAX_TABLE_ITEMS,
    PROB_SUM_SLACK,
};

pub const FORMAT_VERSION: &str = "asm-1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorEntry {
    pub states: Vec<usize>,
    pub prob: f64,
}

/// On-disk form of an [`Instance`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: String,
    pub n: usize,
    pub num_states: usize,
    pub prior: Vec<PriorEntry>,
    pub utility: UtilityDescriptor,
}

fn prior_entries(inst: &Instance) -> Vec<PriorEntry> {
    inst.prior()
        .iter()
        .map(|(phi, p)| PriorEntry {
            states: phi.states().iter().map(|o| o.0).collect(),
            prob: p,
        })
        .collect()
}

impl InstanceFile {
    /// Uses the utility's own descriptor.
    pub fn from_instance(inst: &Instance) -> Result<Self> {
        let utility = inst.utility().descriptor().ok_or_else(|| {
            Error::InvalidInstance(
                "utility has no serializable descriptor; materialize it as a table".into(),
            )
        })?;
        Ok(InstanceFile {
            version: FORMAT_VERSION.into(),
            n: inst.n(),
            num_states: inst.num_states(),
            prior: prior_entries(inst),
            utility,
        })
    }

    /// Tabulates the utility over every subset, for archival or for
    /// utilities without a descriptor.
    pub fn materialized(inst: &Instance) -> Result<Self> {
        let n = inst.n();
        if n > MAX_TABLE_ITEMS {
            return Err(Error::GroundSetTooLarge {
                n,
                max: MAX_TABLE_ITEMS,
            });
        }
        let rows = ItemSet::full(n)
            .subsets()
            .map(|set| crate::model::TableRow {
                set,
                values: (0..inst.prior().len()).map(|i| inst.value(set, i)).collect(),
            })
            .collect();
        Ok(InstanceFile {
            version: FORMAT_VERSION.into(),
            n,
            num_states: inst.num_states(),
            prior: prior_entries(inst),
            utility: UtilityDescriptor::Table {
                rows,
                minimal_dependency: inst.utility().claims_minimal_dependency(),
            },
        })
    }

    fn file_prior(&self) -> Result<Prior> {
        if let Some(e) = self.prior.iter().find(|e| e.states.len() != self.n) {
            return Err(Error::InvalidInstance(format!(
                "prior entry has {} states, expected n = {}",
                e.states.len(),
                self.n
            )));
        }
        Prior::new(
            self.prior
                .iter()
                .map(|e| (Realization::from_labels(e.states.iter().copied()), e.prob))
                .collect(),
        )
    }

    pub fn to_instance(&self, support_cap: usize) -> Result<Instance> {
        if self.version != FORMAT_VERSION {
            return Err(Error::InvalidInstance(format!(
                "unsupported format version '{}', expected '{FORMAT_VERSION}'",
                self.version
            )));
        }
        let prior = self.file_prior()?;
        if prior.len() > support_cap {
            return Err(Error::SupportTooLarge {
                size: prior.len() as u128,
                cap: support_cap,
            });
        }
        let generated = match &self.utility {
            UtilityDescriptor::Table {
                rows,
                minimal_dependency,
            } => {
                let table = TableUtility::new(
                    self.n,
                    prior.len(),
                    rows.iter().map(|r| (r.set, r.values.clone())),
                    *minimal_dependency,
                )?;
                return Instance::from_model(self.num_states, prior, table);
            }
            UtilityDescriptor::ActiveLearning { labels, weights } => build_active_learning(
                &HypothesisSpace::new(labels.clone(), weights.clone())?,
                support_cap,
            )?,
            UtilityDescriptor::Viral { nodes, edges } => {
                build_viral_marketing(&DiffusionGraph::new(*nodes, edges.clone())?, support_cap)?
            }
            UtilityDescriptor::Coverage {
                universe,
                items,
                element_weights,
            } => build_stochastic_coverage(
                *universe,
                items.clone(),
                element_weights.clone(),
                support_cap,
            )?,
            UtilityDescriptor::Sensors { weights, failure } => {
                build_sensor_selection(weights.clone(), failure.clone(), support_cap)?
            }
        };
        let matches = generated.prior().len() == prior.len()
            && generated
                .prior()
                .iter()
                .zip(prior.iter())
                .all(|((a, p), (b, q))| a == b && (p - q).abs() <= PROB_SUM_SLACK);
        if !matches {
            return Err(Error::InvalidInstance(
                "prior does not match the one the utility descriptor generates".into(),
            ));
        }
        if self.num_states < generated.num_states() {
            return Err(Error::InvalidInstance(format!(
                "num_states {} is smaller than the {} states the utility uses",
                self.num_states,
                generated.num_states()
            )));
        }
        Instance::new(self.num_states, prior, generated.utility().clone())
    }
}

/// Parses an instance file.
pub fn read_instance(json: &str, support_cap: usize) -> Result<Instance> {
    serde_json::from_str::<InstanceFile>(json)?.to_instance(support_cap)
}

/// Pretty-printed instance file, using the utility's descriptor.
pub fn write_instance(inst: &Instance) -> Result<String> {
    Ok(serde_json::to_string_pretty(&InstanceFile::from_instance(inst)?)?)
}
