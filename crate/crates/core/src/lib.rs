//! Adaptive submodular maximization with worst-case and average-case
//! guarantees.
//!
//! Items have random states drawn jointly from an explicit prior. A policy
//! picks items one at a time, observes each picked item's state, and is
//! scored by a utility `f(S, φ)` of the picked set under the true
//! realization. The crate provides:
//!
//! - [`model`]: realizations, partial realizations, priors, utilities and the
//!   worst-case and expected marginal operators;
//! - [`constraints`]: cardinality, partition matroid and explicit
//!   independence systems;
//! - [`policies`]: worst-case, average-case, sampled and hybrid greedy
//!   policies;
//! - [`oracle`]: exact optimal policies by backward induction and exact
//!   robustness reports;
//! - [`properties`]: exhaustive checkers for submodularity, monotonicity,
//!   minimal dependency and related conditions;
//! - [`applications`]: active learning, viral marketing, stochastic
//!   coverage and sensor selection instances;
//! - [`experiment`]: the budget sweep comparing the greedy policies.
//!
//! ```
//! use robust_asm::applications::counterexample;
//! use robust_asm::constraints::ConstraintSystem;
//! use robust_asm::oracle::{eval_exact};
//! use robust_asm::policies::GreedyPolicy;
//!
//! let inst = counterexample(0.1).unwrap();
//! let c = ConstraintSystem::cardinality(2);
//! let greedy = GreedyPolicy::wc_cardinality(2, 2).unwrap();
//! let report = eval_exact(&inst, &c, &greedy, None).unwrap();
//! assert!((report.f_wc - 0.1).abs() < 1e-12);
//! assert!((report.opt_wc - 1.0).abs() < 1e-12);
//! ```

pub mod applications;
pub mod constraints;
pub mod error;
pub mod experiment;
pub mod io;
pub mod model;
pub mod oracle;
pub mod policies;
pub mod properties;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/constraints.md")]
    mod constraints {}
    #[doc = include_str!("../../../book/src/policies.md")]
    mod policies {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/properties.md")]
    mod properties {}
    #[doc = include_str!("../../../book/src/applications.md")]
    mod applications {}
}
