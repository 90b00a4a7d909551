//! Exact optimal policies by backward induction, and exact evaluation of
//! any policy against them.

mod eval;
mod solve;
mod tree;

pub use eval::{
    eval_exact, eval_expected_wc, evaluate_policy, ExpectedWc, PolicyEvaluation,
    RobustnessReport,
};
pub use solve::{
    opt_average_case, opt_worst_case, Oracle, OracleSolution, DEFAULT_SEARCH_CAP,
    MAX_ORACLE_SUPPORT,
};
pub use tree::{DecisionTree, Objective, TreeChild, TreeNode};
