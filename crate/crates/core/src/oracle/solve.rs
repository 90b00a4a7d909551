use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};

use super::tree::{DecisionTree, Objective, TreeChild, TreeNode};
use crate::constraints::{ConstraintSystem, MAX_EXHAUSTIVE_ITEMS};
use crate::error::{Error, Result};
use crate::model::{Instance, ItemId, ItemSet, PartialRealization};
use crate::policies::TIE_TOLERANCE;

/// Default bound on `Σ_ψ branching(ψ)` over the reachable game tree.
pub const DEFAULT_SEARCH_CAP: u64 = 10_000_000;

/// Largest prior support the oracle accepts.
pub const MAX_ORACLE_SUPPORT: usize = 64;

/// Optimal value together with a tree attaining it.
#[derive(Clone, Debug)]
pub struct OracleSolution {
    pub value: f64,
    pub tree: DecisionTree,
    /// Distinct partial realizations visited.
    pub states_visited: usize,
}

/// Backward induction over the observation game tree.
#[derive(Clone, Debug)]
pub struct Oracle<'a> {
    inst: &'a Instance,
    constraint: &'a ConstraintSystem,
    cap: u64,
}

impl<'a> Oracle<'a> {
    pub fn new(inst: &'a Instance, constraint: &'a ConstraintSystem) -> Self {
        Oracle {
            inst,
            constraint,
            cap: DEFAULT_SEARCH_CAP,
        }
    }

    pub fn cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    /// Upper estimate of `Σ_ψ branching(ψ)`; exact count of reachable
    /// `(ψ, e)` pairs when the ground set is small enough to enumerate.
    pub fn search_space(&self) -> Result<u64> {
        let n = self.inst.n();
        let support = self.inst.prior().len();
        let bound = self.binomial_bound();
        if bound <= self.cap as f64 || n > MAX_EXHAUSTIVE_ITEMS {
            return Ok(bound.min(u64::MAX as f64) as u64);
        }
        let mut total: u64 = 0;
        for s in ItemSet::full(n).subsets() {
            if !self.constraint.is_independent(s) {
                continue;
            }
            let branching = self.constraint.extensions_of(n, s)?.len() as u64 + 1;
            let mut keys = HashSet::with_capacity(support);
            for (phi, _) in self.inst.prior().iter() {
                let mut h = DefaultHasher::new();
                for e in s.iter() {
                    phi.state(e).hash(&mut h);
                }
                keys.insert(h.finish());
            }
            total = total.saturating_add(keys.len() as u64 * branching);
            if total > self.cap {
                return Ok(total);
            }
        }
        Ok(total)
    }

    fn binomial_bound(&self) -> f64 {
        let n = self.inst.n();
        let support = self.inst.prior().len() as f64;
        let states = self.inst.num_states() as f64;
        let rank = match self.constraint {
            ConstraintSystem::Cardinality { k } => (*k).min(n),
            ConstraintSystem::Partition(pm) => pm.rank().min(n),
            ConstraintSystem::Explicit(ex) => {
                ex.family().iter().map(|s| s.len()).max().unwrap_or(0)
            }
        };
        let mut total = 0.0;
        let mut binom = 1.0;
        for j in 0..=rank {
            if j > 0 {
                binom *= (n - j + 1) as f64 / j as f64;
            }
            total += binom * support.min(states.powi(j as i32)) * (n - j + 1) as f64;
        }
        total
    }

    fn check_size(&self) -> Result<()> {
        let support = self.inst.prior().len();
        if support > MAX_ORACLE_SUPPORT {
            return Err(Error::SupportTooLarge {
                size: support as u128,
                cap: MAX_ORACLE_SUPPORT,
            });
        }
        self.constraint.validate_for(self.inst.n())?;
        let estimate = self.search_space()?;
        if estimate > self.cap {
            return Err(Error::SearchSpaceTooLarge {
                estimate,
                cap: self.cap,
            });
        }
        Ok(())
    }

    pub fn solve(&self, objective: Objective) -> Result<OracleSolution> {
        self.check_size()?;
        let mut solver = Solver {
            inst: self.inst,
            constraint: self.constraint,
            objective,
            memo: HashMap::new(),
        };
        let root = PartialRealization::new();
        let value = solver.value(&root)?;
        let tree = DecisionTree {
            objective,
            root: solver.build(&root)?,
        };
        Ok(OracleSolution {
            value,
            tree,
            states_visited: solver.memo.len(),
        })
    }
}

struct Solver<'a> {
    inst: &'a Instance,
    constraint: &'a ConstraintSystem,
    objective: Objective,
    memo: HashMap<PartialRealization, (f64, Option<ItemId>)>,
}

impl Solver<'_> {
    fn value(&mut self, psi: &PartialRealization) -> Result<f64> {
        if let Some(&(v, _)) = self.memo.get(psi) {
            return Ok(v);
        }
        let inst = self.inst;
        let post = inst.posterior(psi)?;
        let dom = psi.dom();
        let stop = match self.objective {
            Objective::WorstCase => post
                .members()
                .iter()
                .map(|&i| inst.value(dom, i))
                .fold(f64::INFINITY, f64::min),
            Objective::Average => post.f_on_partial(dom),
        };
        let mut best = (stop, None);
        for e in self.constraint.extensions_of(inst.n(), dom)?.iter() {
            let mut v = match self.objective {
                Objective::WorstCase => f64::INFINITY,
                Objective::Average => 0.0,
            };
            for class in post.split(e)? {
                let child = self.value(&psi.with(e, class.state)?)?;
                match self.objective {
                    Objective::WorstCase => v = v.min(child),
                    Objective::Average => v += class.prob * child,
                }
            }
            if v > best.0 + TIE_TOLERANCE {
                best = (v, Some(e));
            }
        }
        self.memo.insert(psi.clone(), best);
        Ok(best.0)
    }

    fn build(&self, psi: &PartialRealization) -> Result<TreeNode> {
        let (value, choice) = self.memo[psi];
        let Some(item) = choice else {
            return Ok(TreeNode::Stop { value });
        };
        let post = self.inst.posterior(psi)?;
        let children = post
            .split(item)?
            .into_iter()
            .map(|class| {
                Ok(TreeChild {
                    state: class.state,
                    node: self.build(&psi.with(item, class.state)?)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(TreeNode::Select {
            item,
            value,
            children,
        })
    }
}

/// `max_π f_wc(π)` subject to `c`, with an optimal tree.
pub fn opt_worst_case(inst: &Instance, c: &ConstraintSystem) -> Result<OracleSolution> {
    Oracle::new(inst, c).solve(Objective::WorstCase)
}

/// `max_π f_avg(π)` subject to `c`, with an optimal tree.
pub fn opt_average_case(inst: &Instance, c: &ConstraintSystem) -> Result<OracleSolution> {
    Oracle::new(inst, c).solve(Objective::Average)
}
