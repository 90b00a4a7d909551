use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;

use super::{
    ItemId, ItemSet, PartialRealization, Prior, RealizationRef, State, UtilityModel, MAX_ITEMS,
};
use crate::error::{Error, Result};

/// How conditional utilities `f(dom ψ, ψ)` are computed inside the marginal
/// operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evaluation {
    /// Full conditional expectation over every consistent realization.
    Exact,
    /// Read `f(dom ψ, ψ)` off one consistent class. Only valid when the
    /// utility has minimal dependency; then it agrees with `Exact`.
    MinimalDependency,
}

/// The complete problem input: ground set, state alphabet, prior and utility.
///
/// Cloning is cheap and clones share the utility memo table.
#[derive(Clone)]
pub struct Instance {
    n: usize,
    num_states: usize,
    prior: Arc<Prior>,
    utility: Arc<dyn UtilityModel>,
    evaluation: Evaluation,
    memo: Arc<DashMap<(u64, u32), f64>>,
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Instance")
            .field("n", &self.n)
            .field("num_states", &self.num_states)
            .field("support", &self.prior.len())
            .field("utility", &self.utility)
            .field("evaluation", &self.evaluation)
            .finish()
    }
}

impl Instance {
    pub fn new(num_states: usize, prior: Prior, utility: Arc<dyn UtilityModel>) -> Result<Self> {
        let n = prior.num_items();
        if n > MAX_ITEMS {
            return Err(Error::GroundSetTooLarge { n, max: MAX_ITEMS });
        }
        if num_states == 0 {
            return Err(Error::InvalidInstance("state alphabet is empty".into()));
        }
        for (phi, _) in prior.iter() {
            if let Some(o) = phi.states().iter().find(|o| o.0 >= num_states) {
                return Err(Error::InvalidInstance(format!(
                    "state {o} outside alphabet of size {num_states}"
                )));
            }
        }
        if prior.len() > u32::MAX as usize {
            return Err(Error::InvalidInstance("prior support too large".into()));
        }
        let evaluation = if utility.claims_minimal_dependency() {
            Evaluation::MinimalDependency
        } else {
            Evaluation::Exact
        };
        Ok(Instance {
            n,
            num_states,
            prior: Arc::new(prior),
            utility,
            evaluation,
            memo: Arc::new(DashMap::new()),
        })
    }

    pub fn from_model<U: UtilityModel + 'static>(
        num_states: usize,
        prior: Prior,
        utility: U,
    ) -> Result<Self> {
        Instance::new(num_states, prior, Arc::new(utility))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn ground_set(&self) -> ItemSet {
        ItemSet::full(self.n)
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn utility(&self) -> &Arc<dyn UtilityModel> {
        &self.utility
    }

    pub fn evaluation(&self) -> Evaluation {
        self.evaluation
    }

    /// Same instance with a different evaluation mode; the memo is shared.
    pub fn with_evaluation(&self, evaluation: Evaluation) -> Instance {
        Instance {
            evaluation,
            ..self.clone()
        }
    }

    /// `f(S, φ_i)` for the `i`-th support realization, memoized.
    pub fn value(&self, set: ItemSet, realization: usize) -> f64 {
        let key = (set.bits(), realization as u32);
        if let Some(v) = self.memo.get(&key) {
            return *v;
        }
        let v = self.utility.value(
            set,
            RealizationRef {
                index: realization,
                phi: self.prior.realization(realization),
            },
        );
        self.memo.insert(key, v);
        v
    }

    /// `f(S, class)` where `class` is a full consistency class on `set`.
    pub(crate) fn class_value(&self, set: ItemSet, class: &[usize]) -> f64 {
        self.utility
            .class_value(set, class, &self.prior)
            .unwrap_or_else(|| self.value(set, class[0]))
    }

    /// Conditional view of the prior given `psi`.
    pub fn posterior<'a>(&'a self, psi: &'a PartialRealization) -> Result<Posterior<'a>> {
        Posterior::new(self, psi)
    }

    /// `p(φ | ψ)` over the consistent support realizations, by support index.
    pub fn conditional_distribution(&self, psi: &PartialRealization) -> Result<Vec<(usize, f64)>> {
        Ok(self.posterior(psi)?.distribution())
    }

    /// `O(e, ψ)`.
    pub fn possible_states(&self, e: ItemId, psi: &PartialRealization) -> Result<Vec<State>> {
        self.posterior(psi)?.possible_states(e)
    }

    /// `f(S, ψ) = E[f(S, Φ) | Φ ~ ψ]`.
    pub fn f_on_partial(&self, set: ItemSet, psi: &PartialRealization) -> Result<f64> {
        Ok(self.posterior(psi)?.f_on_partial(set))
    }

    /// `f_avg(e | ψ)`.
    pub fn avg_marginal(&self, e: ItemId, psi: &PartialRealization) -> Result<f64> {
        self.posterior(psi)?.avg_marginal(e)
    }

    /// `f_wc(e | ψ)`.
    pub fn wc_marginal(&self, e: ItemId, psi: &PartialRealization) -> Result<f64> {
        self.posterior(psi)?.wc_marginal(e)
    }
}

/// The realizations of one possible state of an item, given `ψ`.
#[derive(Clone, Debug)]
pub struct StateClass {
    pub state: State,
    /// `Pr[Φ(e) = state | Φ ~ ψ]`.
    pub prob: f64,
    pub members: Vec<usize>,
}

/// The prior conditioned on a partial realization. Computing it once and
/// querying many items is how the greedy policies spend their time.
pub struct Posterior<'a> {
    inst: &'a Instance,
    psi: &'a PartialRealization,
    members: Vec<usize>,
    mass: f64,
}

impl<'a> Posterior<'a> {
    fn new(inst: &'a Instance, psi: &'a PartialRealization) -> Result<Self> {
        let prior = inst.prior();
        let members: Vec<usize> = (0..prior.len())
            .filter(|&i| prior.realization(i).is_consistent_with(psi))
            .collect();
        if members.is_empty() {
            return Err(Error::InconsistentObservation);
        }
        let mass = members.iter().map(|&i| prior.prob(i)).sum();
        Ok(Posterior {
            inst,
            psi,
            members,
            mass,
        })
    }

    pub fn psi(&self) -> &PartialRealization {
        self.psi
    }

    /// Support indices consistent with `ψ`, ascending.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Prior mass of the consistent realizations.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.inst.prior().prob(i) / self.mass
    }

    pub fn distribution(&self) -> Vec<(usize, f64)> {
        self.members.iter().map(|&i| (i, self.prob(i))).collect()
    }

    fn check_unobserved(&self, e: ItemId) -> Result<()> {
        if e.0 >= self.inst.n() {
            return Err(Error::InvalidArgument(format!("item {e} outside the ground set")));
        }
        if self.psi.dom().contains(e) {
            return Err(Error::AlreadyObserved(e));
        }
        Ok(())
    }

    /// Consistent realizations grouped by the state of `e`, by ascending state.
    pub fn split(&self, e: ItemId) -> Result<Vec<StateClass>> {
        self.check_unobserved(e)?;
        let prior = self.inst.prior();
        let mut classes: Vec<StateClass> = Vec::new();
        for &i in &self.members {
            let o = prior.realization(i).state(e);
            let p = self.prob(i);
            match classes.iter_mut().find(|c| c.state == o) {
                Some(c) => {
                    c.prob += p;
                    c.members.push(i);
                }
                None => classes.push(StateClass {
                    state: o,
                    prob: p,
                    members: vec![i],
                }),
            }
        }
        classes.sort_by_key(|c| c.state);
        Ok(classes)
    }

    pub fn possible_states(&self, e: ItemId) -> Result<Vec<State>> {
        Ok(self.split(e)?.into_iter().map(|c| c.state).collect())
    }

    /// Exact conditional expectation of `f(set, Φ)`.
    pub fn f_on_partial(&self, set: ItemSet) -> f64 {
        self.members
            .iter()
            .map(|&i| self.prob(i) * self.inst.value(set, i))
            .sum()
    }

    /// `f(dom ψ, ψ)` under the instance's evaluation mode.
    pub fn base_value(&self) -> f64 {
        match self.inst.evaluation() {
            Evaluation::Exact => self.f_on_partial(self.psi.dom()),
            Evaluation::MinimalDependency => self.inst.class_value(self.psi.dom(), &self.members),
        }
    }

    /// `f(dom ψ ∪ {e}, ψ ∪ {(e, o)})` for one state class of `e`.
    fn extended_value(&self, extended: ItemSet, class: &StateClass) -> f64 {
        match self.inst.evaluation() {
            Evaluation::Exact => {
                let sum: f64 = class
                    .members
                    .iter()
                    .map(|&i| self.prob(i) * self.inst.value(extended, i))
                    .sum();
                sum / class.prob
            }
            Evaluation::MinimalDependency => self.inst.class_value(extended, &class.members),
        }
    }

    /// `f_avg(e | ψ)`.
    pub fn avg_marginal(&self, e: ItemId) -> Result<f64> {
        self.check_unobserved(e)?;
        let dom = self.psi.dom();
        let extended = dom.with(e);
        Ok(match self.inst.evaluation() {
            Evaluation::Exact => self
                .members
                .iter()
                .map(|&i| self.prob(i) * (self.inst.value(extended, i) - self.inst.value(dom, i)))
                .sum(),
            Evaluation::MinimalDependency => {
                let base = self.base_value();
                self.split(e)?
                    .iter()
                    .map(|c| c.prob * (self.extended_value(extended, c) - base))
                    .sum()
            }
        })
    }

    /// `f_wc(e | ψ)`.
    pub fn wc_marginal(&self, e: ItemId) -> Result<f64> {
        let classes = self.split(e)?;
        let extended = self.psi.dom().with(e);
        let base = self.base_value();
        Ok(classes
            .iter()
            .map(|c| self.extended_value(extended, c) - base)
            .fold(f64::INFINITY, f64::min))
    }
}
