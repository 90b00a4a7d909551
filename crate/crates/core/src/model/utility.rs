use std::collections::HashMap;
use std::fmt;

use super::{ItemSet, Prior, Realization, UtilityDescriptor};
use crate::error::{Error, Result};

/// Largest ground set for which a fully tabulated utility is accepted.
pub const MAX_TABLE_ITEMS: usize = 20;

/// A support realization handed to a utility: its position in the prior
/// and its states.
#[derive(Clone, Copy, Debug)]
pub struct RealizationRef<'a> {
    pub index: usize,
    pub phi: &'a Realization,
}

/// The utility `f(S, φ) ≥ 0` of a set of items under a full realization.
///
/// Implementations must be deterministic. Realizations are always members
/// of the prior support the model was built against.
pub trait UtilityModel: Send + Sync + fmt::Debug {
    fn value(&self, set: ItemSet, phi: RealizationRef<'_>) -> f64;

    /// Value of `set` on an equivalence class: `class` lists *every* support
    /// realization that agrees with its members on `set`. Models whose value
    /// is a function of the class (rather than of one member) can answer
    /// faster here; `None` falls back to [`UtilityModel::value`].
    fn class_value(&self, _set: ItemSet, _class: &[usize], _prior: &Prior) -> Option<f64> {
        None
    }

    /// Whether `f(dom ψ, φ)` is declared to depend only on `ψ`. Enables the
    /// fast marginal path in [`crate::model::Instance`]; checked by
    /// [`crate::properties::Checker::minimal_dependency`].
    fn claims_minimal_dependency(&self) -> bool {
        false
    }

    /// Serializable form, when one exists.
    fn descriptor(&self) -> Option<UtilityDescriptor> {
        None
    }
}

/// A fully tabulated utility: one row per subset, one value per support
/// realization.
#[derive(Clone, Debug)]
pub struct TableUtility {
    n: usize,
    rows: HashMap<ItemSet, Vec<f64>>,
    minimal_dependency: bool,
}

impl TableUtility {
    /// Every one of the `2^n` subsets must be present with exactly
    /// `support_len` non-negative values.
    pub fn new(
        n: usize,
        support_len: usize,
        rows: impl IntoIterator<Item = (ItemSet, Vec<f64>)>,
        minimal_dependency: bool,
    ) -> Result<Self> {
        if n > MAX_TABLE_ITEMS {
            return Err(Error::GroundSetTooLarge {
                n,
                max: MAX_TABLE_ITEMS,
            });
        }
        let full = ItemSet::full(n);
        let mut table = HashMap::new();
        for (set, values) in rows {
            if !set.is_subset(full) {
                return Err(Error::InvalidInstance(format!(
                    "table row {set:?} mentions items outside 0..{n}"
                )));
            }
            if values.len() != support_len {
                return Err(Error::InvalidInstance(format!(
                    "table row {set:?} has {} values, expected {support_len}",
                    values.len()
                )));
            }
            if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::InvalidInstance(format!(
                    "table row {set:?} has invalid value {v}"
                )));
            }
            if table.insert(set, values).is_some() {
                return Err(Error::InvalidInstance(format!("table row {set:?} listed twice")));
            }
        }
        if let Some(missing) = full.subsets().find(|s| !table.contains_key(s)) {
            return Err(Error::InvalidInstance(format!(
                "table has no row for set {missing:?}"
            )));
        }
        Ok(TableUtility {
            n,
            rows: table,
            minimal_dependency,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rows in ascending mask order.
    pub fn rows(&self) -> Vec<(ItemSet, &[f64])> {
        let mut rows: Vec<_> = self.rows.iter().map(|(s, v)| (*s, v.as_slice())).collect();
        rows.sort_by_key(|(s, _)| (s.len(), s.bits()));
        rows
    }
}

impl UtilityModel for TableUtility {
    fn value(&self, set: ItemSet, phi: RealizationRef<'_>) -> f64 {
        self.rows[&set][phi.index]
    }

    fn claims_minimal_dependency(&self) -> bool {
        self.minimal_dependency
    }

    fn descriptor(&self) -> Option<UtilityDescriptor> {
        Some(UtilityDescriptor::Table {
            rows: self
                .rows()
                .into_iter()
                .map(|(set, values)| super::TableRow {
                    set,
                    values: values.to_vec(),
                })
                .collect(),
            minimal_dependency: self.minimal_dependency,
        })
    }
}

/// A utility given by a closure over `(S, φ)`. Not serializable as such;
/// instances built on it can still be written out by materializing a table.
pub struct FnUtility<F> {
    name: String,
    f: F,
    minimal_dependency: bool,
}

impl<F> FnUtility<F>
where
    F: Fn(ItemSet, &Realization) -> f64 + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnUtility {
            name: name.into(),
            f,
            minimal_dependency: false,
        }
    }

    pub fn with_minimal_dependency(mut self, claim: bool) -> Self {
        self.minimal_dependency = claim;
        self
    }
}

impl<F> fmt::Debug for FnUtility<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnUtility").field("name", &self.name).finish()
    }
}

impl<F> UtilityModel for FnUtility<F>
where
    F: Fn(ItemSet, &Realization) -> f64 + Send + Sync,
{
    fn value(&self, set: ItemSet, phi: RealizationRef<'_>) -> f64 {
        (self.f)(set, phi.phi)
    }

    fn claims_minimal_dependency(&self) -> bool {
        self.minimal_dependency
    }
}
