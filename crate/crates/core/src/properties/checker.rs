use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use rayon::prelude::*;

use super::report::{Property, PropertyReport, Witness};
use crate::constraints::MAX_EXHAUSTIVE_ITEMS;
use crate::error::{Error, Result};
use crate::model::{Evaluation, Instance, ItemId, ItemSet, PartialRealization};
use crate::policies::Rule;

/// Default bound on the number of `(ψ, ψ')` pairs a sweep may visit.
pub const DEFAULT_PAIR_CAP: u64 = 1_000_000;

/// Default comparison slack.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

struct Sweep {
    /// Every reachable partial realization, in lexicographic order.
    psis: Vec<PartialRealization>,
    index: HashMap<PartialRealization, usize>,
    /// `(wc, avg)` marginal of each unobserved item, per `ψ`.
    marginals: Vec<Vec<Option<(f64, f64)>>>,
    pairs: u64,
}

/// Exhaustive property checker. Quantifies over the reachable partial
/// realizations, i.e. those consistent with some support realization,
/// and always evaluates conditional utilities exactly.
pub struct Checker {
    inst: Instance,
    tol: f64,
    cap: u64,
    sweep: OnceLock<Sweep>,
}

impl Checker {
    pub fn new(inst: &Instance) -> Self {
        Checker {
            inst: inst.with_evaluation(Evaluation::Exact),
            tol: DEFAULT_TOLERANCE,
            cap: DEFAULT_PAIR_CAP,
            sweep: OnceLock::new(),
        }
    }

    pub fn tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    fn sweep(&self) -> Result<&Sweep> {
        if let Some(s) = self.sweep.get() {
            return Ok(s);
        }
        let s = self.build_sweep()?;
        Ok(self.sweep.get_or_init(|| s))
    }

    fn build_sweep(&self) -> Result<Sweep> {
        let n = self.inst.n();
        if n > MAX_EXHAUSTIVE_ITEMS {
            return Err(Error::GroundSetTooLarge {
                n,
                max: MAX_EXHAUSTIVE_ITEMS,
            });
        }
        let prior = self.inst.prior();
        let mut set = BTreeSet::new();
        let mut pairs: u64 = 0;
        for s in ItemSet::full(n).subsets() {
            for (phi, _) in prior.iter() {
                if set.insert(phi.restrict(s)) {
                    pairs = pairs.saturating_add(1u64 << s.len());
                    if pairs > self.cap {
                        return Err(Error::SearchSpaceTooLarge {
                            estimate: pairs,
                            cap: self.cap,
                        });
                    }
                }
            }
        }
        let psis: Vec<PartialRealization> = set.into_iter().collect();
        let index = psis
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let inst = &self.inst;
        let marginals = psis
            .par_iter()
            .map(|psi| {
                let post = inst.posterior(psi)?;
                (0..n)
                    .map(ItemId)
                    .map(|e| {
                        if psi.dom().contains(e) {
                            Ok(None)
                        } else {
                            Ok(Some((post.wc_marginal(e)?, post.avg_marginal(e)?)))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Sweep {
            psis,
            index,
            marginals,
            pairs,
        })
    }

    /// The reachable partial realizations, in the order witnesses are
    /// searched.
    pub fn reachable(&self) -> Result<&[PartialRealization]> {
        Ok(&self.sweep()?.psis)
    }

    fn pick(rule: Rule, m: (f64, f64)) -> f64 {
        match rule {
            Rule::WorstCase => m.0,
            Rule::Average => m.1,
        }
    }

    fn submodular(&self, property: Property, rule: Rule) -> Result<PropertyReport> {
        let sw = self.sweep()?;
        let n = self.inst.n();
        let tol = self.tol;
        let witness = sw.psis.par_iter().enumerate().find_map_first(|(j, big)| {
            for small_dom in big.dom().subsets() {
                let small = big.restrict(small_dom);
                let i = sw.index[&small];
                for e in ItemSet::full(n).difference(big.dom()).iter() {
                    let at_small = Self::pick(rule, sw.marginals[i][e.0].expect("unobserved"));
                    let at_big = Self::pick(rule, sw.marginals[j][e.0].expect("unobserved"));
                    if at_small < at_big - tol {
                        return Some(Witness::Submodularity {
                            rule,
                            psi: small,
                            psi_prime: big.clone(),
                            item: e,
                            at_psi: at_small,
                            at_psi_prime: at_big,
                        });
                    }
                }
            }
            None
        });
        let checked = sw
            .psis
            .iter()
            .map(|p| (1u64 << p.len()) * (n - p.len()) as u64)
            .sum();
        Ok(PropertyReport::from_search(property, witness, checked))
    }

    fn monotone(&self, property: Property, rule: Rule) -> Result<PropertyReport> {
        let sw = self.sweep()?;
        let tol = self.tol;
        let witness = sw.psis.iter().enumerate().find_map(|(i, psi)| {
            sw.marginals[i].iter().enumerate().find_map(|(e, m)| {
                let v = Self::pick(rule, (*m)?);
                (v < -tol).then(|| Witness::Monotonicity {
                    rule,
                    psi: psi.clone(),
                    item: ItemId(e),
                    value: v,
                })
            })
        });
        let checked = sw
            .psis
            .iter()
            .map(|p| (self.inst.n() - p.len()) as u64)
            .sum();
        Ok(PropertyReport::from_search(property, witness, checked))
    }

    /// `f_wc(e | ψ) ≥ f_wc(e | ψ')` for reachable `ψ ⊆ ψ'`, `e ∉ dom ψ'`.
    pub fn wc_submodular(&self) -> Result<PropertyReport> {
        self.submodular(Property::WcSubmodular, Rule::WorstCase)
    }

    /// `f_wc(e | ψ) ≥ 0` for reachable `ψ`, `e ∉ dom ψ`.
    pub fn wc_monotone(&self) -> Result<PropertyReport> {
        self.monotone(Property::WcMonotone, Rule::WorstCase)
    }

    pub fn adaptive_submodular(&self) -> Result<PropertyReport> {
        self.submodular(Property::AdaptiveSubmodular, Rule::Average)
    }

    pub fn adaptive_monotone(&self) -> Result<PropertyReport> {
        self.monotone(Property::AdaptiveMonotone, Rule::Average)
    }

    /// Submodularity and monotonicity of `f(·, φ)` for every support `φ`.
    /// Submodularity is checked in its local form
    /// `f(S+a) + f(S+b) ≥ f(S+a+b) + f(S)`, which is equivalent for set
    /// functions; a violation is reported as the pair `S ⊆ S+b` and item `a`.
    pub fn pointwise(&self) -> Result<PropertyReport> {
        let n = self.inst.n();
        if n > MAX_EXHAUSTIVE_ITEMS {
            return Err(Error::GroundSetTooLarge {
                n,
                max: MAX_EXHAUSTIVE_ITEMS,
            });
        }
        let inst = &self.inst;
        let tol = self.tol;
        let full = ItemSet::full(n);
        let support = inst.prior().len();
        let witness = (0..support).into_par_iter().find_map_first(|r| {
            let f = |s: ItemSet| inst.value(s, r);
            for s in full.subsets() {
                let base = f(s);
                let outside = full.difference(s);
                for a in outside.iter() {
                    let gain = f(s.with(a)) - base;
                    if gain < -tol {
                        return Some(Witness::PointwiseMonotonicity {
                            realization: r,
                            set: s,
                            item: a,
                            gain,
                        });
                    }
                    for b in outside.iter().filter(|&b| b != a) {
                        let larger = s.with(b);
                        let gain_larger = f(larger.with(a)) - f(larger);
                        if gain < gain_larger - tol {
                            return Some(Witness::PointwiseSubmodularity {
                                realization: r,
                                smaller: s,
                                larger,
                                item: a,
                                gain_smaller: gain,
                                gain_larger,
                            });
                        }
                    }
                }
            }
            None
        });
        let checked = support as u64 * (1u64 << n) * (n * n) as u64;
        Ok(PropertyReport::from_search(Property::Pointwise, witness, checked))
    }

    /// `f(dom ψ, φ)` is the same for every support `φ` consistent with
    /// reachable `ψ`.
    pub fn minimal_dependency(&self) -> Result<PropertyReport> {
        let sw = self.sweep()?;
        let inst = &self.inst;
        let tol = self.tol;
        let witness = sw.psis.par_iter().find_map_first(|psi| {
            let post = inst.posterior(psi).expect("reachable");
            let members = post.members();
            let first = members[0];
            let v0 = inst.value(psi.dom(), first);
            members.iter().skip(1).find_map(|&i| {
                let v = inst.value(psi.dom(), i);
                ((v - v0).abs() > tol).then(|| Witness::MinimalDependency {
                    psi: psi.clone(),
                    realizations: (first, i),
                    values: (v0, v),
                })
            })
        });
        Ok(PropertyReport::from_search(
            Property::MinimalDependency,
            witness,
            sw.psis.len() as u64,
        ))
    }

    /// `O(e, ψ) = O(e, ∅)` for reachable `ψ`, `e ∉ dom ψ`.
    pub fn state_set_stability(&self) -> Result<PropertyReport> {
        let sw = self.sweep()?;
        let inst = &self.inst;
        let n = inst.n();
        let empty = PartialRealization::new();
        let root = inst.posterior(&empty)?;
        let prior_states = (0..n)
            .map(|e| root.possible_states(ItemId(e)))
            .collect::<Result<Vec<_>>>()?;
        let witness = sw.psis.par_iter().find_map_first(|psi| {
            let post = inst.posterior(psi).expect("reachable");
            ItemSet::full(n).difference(psi.dom()).iter().find_map(|e| {
                let states = post.possible_states(e).expect("unobserved");
                (states != prior_states[e.0]).then(|| Witness::StateSet {
                    psi: psi.clone(),
                    item: e,
                    states,
                    prior_states: prior_states[e.0].clone(),
                })
            })
        });
        let checked = sw.psis.iter().map(|p| (n - p.len()) as u64).sum();
        Ok(PropertyReport::from_search(
            Property::StateSetStability,
            witness,
            checked,
        ))
    }

    /// If state-set stability, pointwise submodularity and minimal
    /// dependency all hold, worst-case monotonicity and submodularity must
    /// hold too. Vacuously passes when a premise fails.
    pub fn prop2_implication(&self) -> Result<PropertyReport> {
        let premises = [
            self.state_set_stability()?,
            self.pointwise()?,
            self.minimal_dependency()?,
        ];
        if let Some(failed) = premises.iter().find(|r| !r.passed()) {
            let mut report = PropertyReport::from_search(Property::Prop2Implication, None, 0);
            report.note = Some(format!("vacuous: premise {} fails", failed.property));
            return Ok(report);
        }
        let conclusions = [self.wc_monotone()?, self.wc_submodular()?];
        let failed: Vec<Property> = conclusions
            .iter()
            .filter(|r| !r.passed())
            .map(|r| r.property)
            .collect();
        let checked = premises.iter().chain(&conclusions).map(|r| r.checked).sum();
        let witness = (!failed.is_empty()).then_some(Witness::Implication { failed });
        let mut report = PropertyReport::from_search(Property::Prop2Implication, witness, checked);
        if report.passed() {
            report.note = Some("premises hold and conclusions hold".into());
        }
        Ok(report)
    }

    pub fn check(&self, property: Property) -> Result<PropertyReport> {
        match property {
            Property::WcSubmodular => self.wc_submodular(),
            Property::WcMonotone => self.wc_monotone(),
            Property::AdaptiveSubmodular => self.adaptive_submodular(),
            Property::AdaptiveMonotone => self.adaptive_monotone(),
            Property::Pointwise => self.pointwise(),
            Property::MinimalDependency => self.minimal_dependency(),
            Property::StateSetStability => self.state_set_stability(),
            Property::Prop2Implication => self.prop2_implication(),
        }
    }

    /// Number of `(ψ, ψ')` pairs in the submodularity sweeps.
    pub fn pair_count(&self) -> Result<u64> {
        Ok(self.sweep()?.pairs)
    }
}
