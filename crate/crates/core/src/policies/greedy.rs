use serde::{Deserialize, Serialize};

use super::weights::{avg_slots, check_q, wc_slots};
use super::{Decision, DecisionCache, Environment, Policy, PolicyRun, Step, TIE_TOLERANCE};
use crate::constraints::{ConstraintSystem, PartitionMatroid};
use crate::error::{Error, Result};
use crate::model::{Instance, ItemId, ItemSet, PartialRealization, Posterior};

/// Which marginal a greedy stage maximizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    WorstCase,
    Average,
}

impl Rule {
    pub(crate) fn marginal(self, post: &Posterior<'_>, e: ItemId) -> Result<f64> {
        match self {
            Rule::WorstCase => post.wc_marginal(e),
            Rule::Average => post.avg_marginal(e),
        }
    }
}

#[derive(Clone, Debug)]
enum Pool {
    /// Feasible extensions of the stage's own observation.
    Constraint(ConstraintSystem),
    /// A fixed item set (`None` = the whole ground set).
    Items(Option<ItemSet>),
}

#[derive(Clone, Debug)]
struct Stage {
    rule: Rule,
    pool: Pool,
    /// `None` runs until the pool is exhausted.
    budget: Option<usize>,
    /// Start from an empty partial realization, ignoring earlier stages.
    fresh: bool,
}

/// A deterministic greedy policy made of consecutive stages. Every policy
/// of the family except the sampled one is a particular stage list.
#[derive(Clone, Debug)]
pub struct GreedyPolicy {
    name: String,
    stages: Vec<Stage>,
    exclude_repeats: bool,
    cardinality: Option<usize>,
}

impl GreedyPolicy {
    fn new(name: impl Into<String>, stages: Vec<Stage>) -> Self {
        GreedyPolicy {
            name: name.into(),
            stages,
            exclude_repeats: false,
            cardinality: None,
        }
    }

    /// Worst-case greedy over the feasible extensions of `c` (`π^w`).
    pub fn wc_psystem(c: ConstraintSystem) -> Self {
        Self::new(
            "wc-psystem",
            vec![Stage {
                rule: Rule::WorstCase,
                pool: Pool::Constraint(c),
                budget: None,
                fresh: true,
            }],
        )
    }

    /// Worst-case greedy for `k` slots, stopped after `budget` (`π^g_t`).
    pub fn wc_cardinality(k: usize, budget: usize) -> Result<Self> {
        if budget > k {
            return Err(Error::InvalidArgument(format!(
                "budget {budget} exceeds cardinality {k}"
            )));
        }
        let mut p = Self::new("wc-card", vec![Self::items(Rule::WorstCase, None, budget, true)]);
        p.cardinality = Some(k);
        Ok(p)
    }

    /// Average-case greedy for `budget` picks within `restrict` (`π^a`).
    pub fn avg(budget: usize, restrict: Option<ItemSet>) -> Self {
        Self::new("avg", vec![Self::items(Rule::Average, restrict, budget, true)])
    }

    /// `π^g` on `⌊qk⌋` slots, then `π^a` on `⌈(1−q)k⌉` slots from a fresh
    /// observation (`π^h`, or `π^{h+}` for `q ≠ 1/2`).
    pub fn hybrid_cardinality(k: usize, q: f64) -> Result<Self> {
        check_q(q)?;
        let mut p = Self::new(
            "hybrid-card",
            vec![
                Self::items(Rule::WorstCase, None, wc_slots(q, k), true),
                Self::items(Rule::Average, None, avg_slots(q, k), true),
            ],
        );
        p.cardinality = Some(k);
        Ok(p)
    }

    /// One meta-round per block in ascending order: `⌊q·k_z⌋` worst-case
    /// picks or `⌈(1−q)·k_z⌉` average-case picks within `E_z`, with
    /// observations carried across blocks (`π^mw` / `π^ma`).
    pub fn matroid(pm: PartitionMatroid, mode: Rule, q: f64) -> Result<Self> {
        check_q(q)?;
        let name = match mode {
            Rule::WorstCase => "matroid-wc",
            Rule::Average => "matroid-avg",
        };
        Ok(Self::new(name, Self::matroid_stages(&pm, mode, q, true)))
    }

    /// `π^mw` followed by `π^ma` from a fresh observation (`π^m`).
    pub fn hybrid_matroid(pm: PartitionMatroid, q: f64) -> Result<Self> {
        check_q(q)?;
        let mut stages = Self::matroid_stages(&pm, Rule::WorstCase, q, true);
        stages.extend(Self::matroid_stages(&pm, Rule::Average, q, true));
        Ok(Self::new("hybrid-matroid", stages))
    }

    /// Whether a later phase may re-pick an item an earlier phase already
    /// selected. Off by default: a repeat simply wastes a slot.
    pub fn exclude_repeats(mut self, exclude: bool) -> Self {
        self.exclude_repeats = exclude;
        self
    }

    fn items(rule: Rule, restrict: Option<ItemSet>, budget: usize, fresh: bool) -> Stage {
        Stage {
            rule,
            pool: Pool::Items(restrict),
            budget: Some(budget),
            fresh,
        }
    }

    fn matroid_stages(pm: &PartitionMatroid, mode: Rule, q: f64, fresh: bool) -> Vec<Stage> {
        pm.blocks()
            .iter()
            .zip(pm.limits())
            .enumerate()
            .map(|(z, (&block, &k))| {
                let budget = match mode {
                    Rule::WorstCase => wc_slots(q, k),
                    Rule::Average => avg_slots(q, k),
                };
                Self::items(mode, Some(block), budget, fresh && z == 0)
            })
            .collect()
    }

    fn decide(
        &self,
        inst: &Instance,
        stage: &Stage,
        psi: &PartialRealization,
        excluded: ItemSet,
    ) -> Result<Option<Decision>> {
        let candidates = match &stage.pool {
            Pool::Constraint(c) => c.feasible_extensions(inst.n(), psi)?,
            Pool::Items(restrict) => restrict
                .unwrap_or_else(|| inst.ground_set())
                .intersection(inst.ground_set())
                .difference(psi.dom()),
        }
        .difference(excluded);
        if candidates.is_empty() {
            return Ok(None);
        }
        let post = inst.posterior(psi)?;
        let mut best: Option<Decision> = None;
        for e in candidates.iter() {
            let m = stage.rule.marginal(&post, e)?;
            if best.is_none_or(|b| m > b.marginal + TIE_TOLERANCE) {
                best = Some(Decision {
                    item: e,
                    marginal: m,
                    evaluations: 0,
                });
            }
        }
        Ok(best.map(|b| Decision {
            evaluations: candidates.len(),
            ..b
        }))
    }
}

impl Policy for GreedyPolicy {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn run_cached(
        &self,
        inst: &Instance,
        env: &Environment<'_>,
        cache: &mut DecisionCache,
    ) -> Result<PolicyRun> {
        if let Some(k) = self.cardinality {
            if k > inst.n() {
                return Err(Error::InvalidArgument(format!(
                    "cardinality {k} exceeds the {} items",
                    inst.n()
                )));
            }
        }
        let mut observation = PartialRealization::new();
        let mut psi = PartialRealization::new();
        let mut steps = Vec::new();
        let mut evaluations = 0;
        for (index, stage) in self.stages.iter().enumerate() {
            if stage.fresh {
                psi = PartialRealization::new();
            }
            let mut taken = 0;
            while stage.budget.is_none_or(|b| taken < b) {
                let excluded = if self.exclude_repeats {
                    observation.dom()
                } else {
                    ItemSet::EMPTY
                };
                let decision = cache.decision((index, excluded.bits(), &psi), || {
                    self.decide(inst, stage, &psi, excluded)
                })?;
                let Some(d) = decision else { break };
                let state = env.reveal(d.item);
                psi.insert(d.item, state)?;
                if !observation.dom().contains(d.item) {
                    observation.insert(d.item, state)?;
                }
                evaluations += d.evaluations;
                steps.push(Step {
                    item: d.item,
                    state,
                    marginal: d.marginal,
                    stage: index,
                });
                taken += 1;
            }
        }
        let utility = cache.leaf(inst, &observation, env.index())?;
        Ok(PolicyRun {
            policy: self.name(),
            environment: env.index(),
            steps,
            selected: observation.dom(),
            observation,
            utility,
            evaluations,
        })
    }
}
