use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ItemId, ItemSet, State};
use crate::error::{Error, Result};

/// Slack allowed on the sum of prior probabilities.
pub const PROB_SUM_SLACK: f64 = 1e-9;

/// A full assignment of a state to every item.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Realization(Vec<State>);

impl Realization {
    pub fn new(states: Vec<State>) -> Self {
        Realization(states)
    }

    pub fn from_labels<I: IntoIterator<Item = usize>>(labels: I) -> Self {
        Realization(labels.into_iter().map(State).collect())
    }

    pub fn state(&self, e: ItemId) -> State {
        self.0[e.0]
    }

    pub fn states(&self) -> &[State] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `φ ~ ψ`: agrees with every observation in `psi`.
    pub fn is_consistent_with(&self, psi: &PartialRealization) -> bool {
        psi.iter().all(|(e, o)| self.0.get(e.0) == Some(&o))
    }

    /// The partial realization `φ` induces on `set`.
    pub fn restrict(&self, set: ItemSet) -> PartialRealization {
        PartialRealization::from_sorted_unchecked(set.iter().map(|e| (e, self.state(e))).collect())
    }
}

/// `consistent(φ, ψ)`.
pub fn consistent(phi: &Realization, psi: &PartialRealization) -> bool {
    phi.is_consistent_with(psi)
}

/// `ψ ⊆ ψ'`.
pub fn subrealization(psi: &PartialRealization, other: &PartialRealization) -> bool {
    psi.is_subrealization_of(other)
}

/// Observations gathered so far: a partial map from items to states, kept
/// sorted by item so that equal observations compare and hash equal.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialRealization {
    entries: Vec<(ItemId, State)>,
    dom: ItemSet,
}

impl PartialRealization {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (ItemId, State)>>(pairs: I) -> Result<Self> {
        let mut psi = PartialRealization::new();
        for (e, o) in pairs {
            psi.insert(e, o)?;
        }
        Ok(psi)
    }

    fn from_sorted_unchecked(entries: Vec<(ItemId, State)>) -> Self {
        let dom = entries.iter().map(|&(e, _)| e).collect();
        PartialRealization { entries, dom }
    }

    pub fn dom(&self) -> ItemSet {
        self.dom
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, e: ItemId) -> Option<State> {
        if !self.dom.contains(e) {
            return None;
        }
        self.entries
            .binary_search_by_key(&e, |&(i, _)| i)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn insert(&mut self, e: ItemId, o: State) -> Result<()> {
        if e.0 >= super::MAX_ITEMS {
            return Err(Error::InvalidInstance(format!("item {e} out of range")));
        }
        match self.entries.binary_search_by_key(&e, |&(i, _)| i) {
            Ok(_) => Err(Error::AlreadyObserved(e)),
            Err(pos) => {
                self.entries.insert(pos, (e, o));
                self.dom.insert(e);
                Ok(())
            }
        }
    }

    /// `ψ ∪ {(e, o)}`.
    pub fn with(&self, e: ItemId, o: State) -> Result<Self> {
        let mut next = self.clone();
        next.insert(e, o)?;
        Ok(next)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ItemId, State)> + '_ {
        self.entries.iter().copied()
    }

    pub fn pairs(&self) -> &[(ItemId, State)] {
        &self.entries
    }

    pub fn is_subrealization_of(&self, other: &PartialRealization) -> bool {
        self.dom.is_subset(other.dom) && self.iter().all(|(e, o)| other.get(e) == Some(o))
    }

    /// The observations of `self` on `set`.
    pub fn restrict(&self, set: ItemSet) -> PartialRealization {
        PartialRealization::from_sorted_unchecked(
            self.iter().filter(|&(e, _)| set.contains(e)).collect(),
        )
    }
}

impl fmt::Debug for PartialRealization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter().map(|(e, o)| (e.0, o.0))).finish()
    }
}

impl fmt::Display for PartialRealization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (e, o)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({e}, {o})")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for PartialRealization {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.entries.iter())
    }
}

impl<'de> Deserialize<'de> for PartialRealization {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(ItemId, State)>::deserialize(d)?;
        PartialRealization::from_pairs(pairs).map_err(serde::de::Error::custom)
    }
}

/// An explicit finite prior: the positive-probability realizations `U⁺`
/// with their probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Prior {
    support: Vec<(Realization, f64)>,
}

impl Prior {
    pub fn new(support: Vec<(Realization, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidInstance("prior support is empty".into()));
        }
        let n = support[0].0.len();
        let mut sum = 0.0;
        for (phi, p) in &support {
            if phi.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "realization lengths differ: {} vs {n}",
                    phi.len()
                )));
            }
            if !(*p > 0.0 && *p <= 1.0 + PROB_SUM_SLACK) || !p.is_finite() {
                return Err(Error::InvalidInstance(format!(
                    "probability {p} outside (0, 1]"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > PROB_SUM_SLACK {
            return Err(Error::InvalidInstance(format!(
                "prior probabilities sum to {sum}, not 1"
            )));
        }
        let mut sorted: Vec<&Realization> = support.iter().map(|(r, _)| r).collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInstance(
                "prior support contains a repeated realization".into(),
            ));
        }
        Ok(Prior { support })
    }

    /// Uniform prior over `realizations`.
    pub fn uniform(realizations: Vec<Realization>) -> Result<Self> {
        let p = 1.0 / realizations.len().max(1) as f64;
        Prior::new(realizations.into_iter().map(|r| (r, p)).collect())
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn realization(&self, i: usize) -> &Realization {
        &self.support[i].0
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.support[i].1
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Realization, f64)> {
        self.support.iter().map(|(r, p)| (r, *p))
    }

    pub fn num_items(&self) -> usize {
        self.support[0].0.len()
    }

    pub fn index_of(&self, phi: &Realization) -> Option<usize> {
        self.support.iter().position(|(r, _)| r == phi)
    }
}
