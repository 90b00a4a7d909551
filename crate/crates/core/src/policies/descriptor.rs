use serde::{Deserialize, Serialize};

use super::weights::{optimal_q_cardinality, optimal_q_matroid};
use super::{GreedyPolicy, Policy, Rule, StochasticWcGreedy};
use crate::constraints::ConstraintSystem;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    WcPsystem,
    WcCard,
    StochWc,
    Avg,
    HybridCard,
    MatroidWc,
    MatroidAvg,
    HybridMatroid,
}

/// JSON description of a policy. Unset fields are filled from the
/// constraint (`k`) or from `beta` (`q`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyDescriptor {
    pub policy: PolicyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Picks to make, for `wc-card` and `avg`; defaults to `k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exclude_repeats: Option<bool>,
}

impl PolicyDescriptor {
    pub fn new(policy: PolicyKind) -> Self {
        PolicyDescriptor {
            policy,
            k: None,
            budget: None,
            eps: None,
            q: None,
            beta: None,
            seed: None,
            exclude_repeats: None,
        }
    }

    /// `k` as given, else the bound of a cardinality constraint, else the
    /// rank of a partition matroid.
    pub fn resolve_k(&self, c: &ConstraintSystem) -> Result<usize> {
        if let Some(k) = self.k {
            return Ok(k);
        }
        match c {
            ConstraintSystem::Cardinality { k } => Ok(*k),
            ConstraintSystem::Partition(pm) => Ok(pm.rank()),
            ConstraintSystem::Explicit(_) => Err(Error::InvalidPolicy(format!(
                "{:?} needs an explicit k under an explicit constraint",
                self.policy
            ))),
        }
    }

    /// `q` as given, else the optimal weight for `beta`, else 1/2.
    pub fn resolve_q(&self) -> Result<f64> {
        if let Some(q) = self.q {
            return Ok(q);
        }
        match self.beta {
            None => Ok(0.5),
            Some(beta) => match self.policy {
                PolicyKind::MatroidWc | PolicyKind::MatroidAvg | PolicyKind::HybridMatroid => {
                    optimal_q_matroid(beta)
                }
                _ => optimal_q_cardinality(beta),
            },
        }
    }

    /// Builds the policy against constraint `c`; `seed` is used when the
    /// descriptor has none.
    pub fn build(&self, c: &ConstraintSystem, seed: u64) -> Result<Box<dyn Policy>> {
        let partition = || {
            c.as_partition().cloned().ok_or_else(|| {
                Error::InvalidPolicy(format!("{:?} needs a partition constraint", self.policy))
            })
        };
        let exclude = self.exclude_repeats.unwrap_or(false);
        Ok(match self.policy {
            PolicyKind::WcPsystem => Box::new(GreedyPolicy::wc_psystem(c.clone())),
            PolicyKind::WcCard => {
                let k = self.resolve_k(c)?;
                Box::new(GreedyPolicy::wc_cardinality(k, self.budget.unwrap_or(k))?)
            }
            PolicyKind::StochWc => {
                let eps = self
                    .eps
                    .ok_or_else(|| Error::InvalidPolicy("stoch-wc needs eps".into()))?;
                Box::new(StochasticWcGreedy::new(
                    self.resolve_k(c)?,
                    eps,
                    self.seed.unwrap_or(seed),
                )?)
            }
            PolicyKind::Avg => {
                let budget = match self.budget {
                    Some(b) => b,
                    None => self.resolve_k(c)?,
                };
                Box::new(GreedyPolicy::avg(budget, None))
            }
            PolicyKind::HybridCard => Box::new(
                GreedyPolicy::hybrid_cardinality(self.resolve_k(c)?, self.resolve_q()?)?
                    .exclude_repeats(exclude),
            ),
            PolicyKind::MatroidWc => Box::new(GreedyPolicy::matroid(
                partition()?,
                Rule::WorstCase,
                self.resolve_q()?,
            )?),
            PolicyKind::MatroidAvg => Box::new(GreedyPolicy::matroid(
                partition()?,
                Rule::Average,
                self.resolve_q()?,
            )?),
            PolicyKind::HybridMatroid => Box::new(
                GreedyPolicy::hybrid_matroid(partition()?, self.resolve_q()?)?
                    .exclude_repeats(exclude),
            ),
        })
    }
}
