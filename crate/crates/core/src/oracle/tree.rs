use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, ItemId, PartialRealization, State};
use crate::policies::{DecisionCache, Environment, Policy, PolicyRun, Step};

/// Which policy value the oracle maximizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    WorstCase,
    Average,
}

/// A node of a compiled contingency plan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "kebab-case")]
pub enum TreeNode {
    Stop {
        value: f64,
    },
    Select {
        item: ItemId,
        value: f64,
        /// One child per possible state of `item`, by ascending state.
        children: Vec<TreeChild>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeChild {
    pub state: State,
    pub node: TreeNode,
}

impl TreeNode {
    /// Optimal value of the subtree under the tree's objective.
    pub fn value(&self) -> f64 {
        match self {
            TreeNode::Stop { value } | TreeNode::Select { value, .. } => *value,
        }
    }

    /// Number of nodes in the subtree.
    pub fn size(&self) -> usize {
        match self {
            TreeNode::Stop { .. } => 1,
            TreeNode::Select { children, .. } => {
                1 + children.iter().map(|c| c.node.size()).sum::<usize>()
            }
        }
    }
}

/// A deterministic policy given explicitly as a decision tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub objective: Objective,
    pub root: TreeNode,
}

impl DecisionTree {
    pub fn value(&self) -> f64 {
        self.root.value()
    }
}

impl Policy for DecisionTree {
    fn name(&self) -> String {
        match self.objective {
            Objective::WorstCase => "oracle-wc".into(),
            Objective::Average => "oracle-avg".into(),
        }
    }

    /// Each step records the value of the node it was taken from.
    fn run_cached(
        &self,
        inst: &Instance,
        env: &Environment<'_>,
        cache: &mut DecisionCache,
    ) -> Result<PolicyRun> {
        let mut psi = PartialRealization::new();
        let mut steps = Vec::new();
        let mut node = &self.root;
        while let TreeNode::Select {
            item,
            value,
            children,
        } = node
        {
            let state = env.reveal(*item);
            psi.insert(*item, state)?;
            steps.push(Step {
                item: *item,
                state,
                marginal: *value,
                stage: 0,
            });
            node = &children
                .iter()
                .find(|c| c.state == state)
                .ok_or_else(|| {
                    Error::InvalidPolicy(format!(
                        "decision tree has no branch for {item} in state {state}"
                    ))
                })?
                .node;
        }
        let utility = cache.leaf(inst, &psi, env.index())?;
        Ok(PolicyRun {
            policy: self.name(),
            environment: env.index(),
            steps,
            selected: psi.dom(),
            observation: psi,
            utility,
            evaluations: 0,
        })
    }
}
