//! The greedy policies and their weighted hybrids, run interactively
//! against an environment that hides the true realization.

mod descriptor;
mod greedy;
mod stochastic;
mod weights;

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Evaluation, Instance, ItemId, ItemSet, PartialRealization, Realization, State};

pub use descriptor::{PolicyDescriptor, PolicyKind};
pub use greedy::{GreedyPolicy, Rule};
pub use stochastic::{sample_size, StochasticWcGreedy};
pub use weights::{avg_slots, optimal_q_cardinality, optimal_q_matroid, wc_slots};

use crate::constraints::{ConstraintSystem, PartitionMatroid};

/// Two marginals closer than this are a tie, broken by lowest item id.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// The hidden ground truth a policy interacts with.
#[derive(Clone, Copy, Debug)]
pub struct Environment<'a> {
    index: usize,
    phi: &'a Realization,
}

impl<'a> Environment<'a> {
    /// The environment whose realization is support entry `index`.
    pub fn new(inst: &'a Instance, index: usize) -> Result<Self> {
        if index >= inst.prior().len() {
            return Err(Error::InvalidArgument(format!(
                "realization index {index} out of range (support has {})",
                inst.prior().len()
            )));
        }
        Ok(Environment {
            index,
            phi: inst.prior().realization(index),
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn reveal(&self, e: ItemId) -> State {
        self.phi.state(e)
    }
}

/// One selection of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step {
    pub item: ItemId,
    pub state: State,
    /// The marginal the policy maximized when choosing `item`.
    pub marginal: f64,
    /// Index of the phase (hybrid) or block (matroid) that made the pick.
    pub stage: usize,
}

/// A policy's trajectory against one realization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolicyRun {
    pub policy: String,
    pub environment: usize,
    pub steps: Vec<Step>,
    /// Everything revealed during the run.
    pub observation: PartialRealization,
    /// `E(π, φ)`.
    pub selected: ItemSet,
    /// `f(E(π, φ), φ)`.
    pub utility: f64,
    /// Number of marginal evaluations spent choosing items.
    pub evaluations: usize,
}

/// Memo of a deterministic policy's decisions, keyed by what the decision
/// depends on. Only valid for one (instance, policy) pair.
#[derive(Default)]
pub struct DecisionCache {
    decisions: HashMap<(usize, u64, PartialRealization), Option<Decision>>,
    leaves: HashMap<PartialRealization, f64>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Decision {
    pub item: ItemId,
    pub marginal: f64,
    pub evaluations: usize,
}

impl DecisionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn decision(
        &mut self,
        key: (usize, u64, &PartialRealization),
        decide: impl FnOnce() -> Result<Option<Decision>>,
    ) -> Result<Option<Decision>> {
        let owned = (key.0, key.1, key.2.clone());
        if let Some(d) = self.decisions.get(&owned) {
            return Ok(*d);
        }
        let d = decide()?;
        self.decisions.insert(owned, d);
        Ok(d)
    }

    /// `f(dom ψ, φ)` at the end of a run. With minimal dependency the value
    /// is a function of `ψ` alone and is shared across environments.
    pub(crate) fn leaf(
        &mut self,
        inst: &Instance,
        observation: &PartialRealization,
        env: usize,
    ) -> Result<f64> {
        match inst.evaluation() {
            Evaluation::Exact => Ok(inst.value(observation.dom(), env)),
            Evaluation::MinimalDependency => {
                if let Some(v) = self.leaves.get(observation) {
                    return Ok(*v);
                }
                let v = inst.posterior(observation)?.base_value();
                self.leaves.insert(observation.clone(), v);
                Ok(v)
            }
        }
    }
}

/// An adaptive policy.
pub trait Policy: Send + Sync {
    fn name(&self) -> String;

    /// Runs against `env`, reusing decisions memoized in `cache`. The cache
    /// must only ever be shared between runs of this policy on `inst`.
    fn run_cached(
        &self,
        inst: &Instance,
        env: &Environment<'_>,
        cache: &mut DecisionCache,
    ) -> Result<PolicyRun>;

    fn run(&self, inst: &Instance, env: &Environment<'_>) -> Result<PolicyRun> {
        self.run_cached(inst, env, &mut DecisionCache::new())
    }
}

/// Worst-case greedy until no feasible extension remains.
pub fn run_wc_greedy_psystem(
    inst: &Instance,
    c: &ConstraintSystem,
    env: &Environment<'_>,
) -> Result<PolicyRun> {
    GreedyPolicy::wc_psystem(c.clone()).run(inst, env)
}

/// Worst-case greedy under a cardinality bound, stopped after `budget` picks.
pub fn run_wc_greedy_cardinality(
    inst: &Instance,
    k: usize,
    budget: usize,
    env: &Environment<'_>,
) -> Result<PolicyRun> {
    GreedyPolicy::wc_cardinality(k, budget)?.run(inst, env)
}

/// Sampled worst-case greedy with a seeded sampling stream.
pub fn run_stochastic_wc_greedy(
    inst: &Instance,
    k: usize,
    eps: f64,
    env: &Environment<'_>,
    seed: u64,
) -> Result<PolicyRun> {
    StochasticWcGreedy::new(k, eps, seed)?.run(inst, env)
}

/// Average-case greedy with an explicit budget, optionally restricted to `restrict`.
pub fn run_avg_greedy(
    inst: &Instance,
    budget: usize,
    restrict: Option<ItemSet>,
    env: &Environment<'_>,
) -> Result<PolicyRun> {
    GreedyPolicy::avg(budget, restrict).run(inst, env)
}

/// Cardinality hybrid: worst-case picks for a `q` share of the budget, then
/// average-case picks from a fresh observation.
pub fn run_hybrid_cardinality(
    inst: &Instance,
    k: usize,
    env: &Environment<'_>,
    q: f64,
) -> Result<PolicyRun> {
    GreedyPolicy::hybrid_cardinality(k, q)?.run(inst, env)
}

/// Partition-matroid greedy under one rule, in meta-rounds weighted by `q`.
pub fn run_matroid_greedy(
    inst: &Instance,
    pm: &PartitionMatroid,
    mode: Rule,
    q: f64,
    env: &Environment<'_>,
) -> Result<PolicyRun> {
    GreedyPolicy::matroid(pm.clone(), mode, q)?.run(inst, env)
}

/// Partition-matroid hybrid of the worst-case and average-case rounds.
pub fn run_hybrid_matroid(
    inst: &Instance,
    pm: &PartitionMatroid,
    env: &Environment<'_>,
    q: f64,
) -> Result<PolicyRun> {
    GreedyPolicy::hybrid_matroid(pm.clone(), q)?.run(inst, env)
}
