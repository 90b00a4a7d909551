//! Independence systems: cardinality, partition matroids and explicit
//! downward-closed families, plus an exhaustive p-system verifier.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ItemId, ItemSet, PartialRealization, MAX_ITEMS};

/// Largest ground set the exhaustive routines accept.
pub const MAX_EXHAUSTIVE_ITEMS: usize = 20;

/// JSON form of a constraint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ConstraintDescriptor {
    Cardinality {
        k: usize,
    },
    Partition {
        blocks: Vec<Vec<usize>>,
        limits: Vec<usize>,
    },
    Explicit {
        independent_sets: Vec<Vec<usize>>,
        p: usize,
    },
}

/// Disjoint blocks `E_1..E_b` with limits `k_1..k_b`. Items outside every
/// block are never selectable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionMatroid {
    blocks: Vec<ItemSet>,
    limits: Vec<usize>,
}

impl PartitionMatroid {
    pub fn new(blocks: Vec<ItemSet>, limits: Vec<usize>) -> Result<Self> {
        if blocks.len() != limits.len() {
            return Err(Error::InvalidConstraint(format!(
                "{} blocks but {} limits",
                blocks.len(),
                limits.len()
            )));
        }
        if blocks.is_empty() {
            return Err(Error::InvalidConstraint("partition matroid needs a block".into()));
        }
        let mut seen = ItemSet::EMPTY;
        for (z, (&block, &limit)) in blocks.iter().zip(&limits).enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidConstraint(format!("block {z} is empty")));
            }
            if limit == 0 {
                return Err(Error::InvalidConstraint(format!("block {z} has limit 0")));
            }
            if !block.intersection(seen).is_empty() {
                return Err(Error::InvalidConstraint(format!(
                    "block {z} overlaps an earlier block"
                )));
            }
            seen = seen.union(block);
        }
        Ok(PartitionMatroid { blocks, limits })
    }

    pub fn blocks(&self) -> &[ItemSet] {
        &self.blocks
    }

    pub fn limits(&self) -> &[usize] {
        &self.limits
    }

    /// Items covered by some block.
    pub fn selectable(&self) -> ItemSet {
        self.blocks.iter().fold(ItemSet::EMPTY, |acc, b| acc.union(*b))
    }

    pub fn is_independent(&self, set: ItemSet) -> bool {
        set.is_subset(self.selectable())
            && self
                .blocks
                .iter()
                .zip(&self.limits)
                .all(|(b, &k)| set.intersection(*b).len() <= k)
    }

    /// `k = Σ k_z`.
    pub fn rank(&self) -> usize {
        self.limits.iter().sum()
    }
}

/// A downward-closed family stored as its full list of independent sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitSystem {
    family: Vec<ItemSet>,
    p: usize,
}

impl ExplicitSystem {
    pub fn new(sets: impl IntoIterator<Item = ItemSet>, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidConstraint("p must be at least 1".into()));
        }
        let mut family: Vec<ItemSet> = sets.into_iter().collect();
        family.sort();
        family.dedup();
        let support = family.iter().fold(ItemSet::EMPTY, |acc, s| acc.union(*s));
        if support.iter().any(|e| e.0 >= MAX_EXHAUSTIVE_ITEMS) {
            return Err(Error::GroundSetTooLarge {
                n: support.iter().last().map_or(0, |e| e.0 + 1),
                max: MAX_EXHAUSTIVE_ITEMS,
            });
        }
        if family.binary_search(&ItemSet::EMPTY).is_err() {
            return Err(Error::InvalidConstraint("the empty set must be independent".into()));
        }
        // One-element deletions suffice: by induction they reach every subset.
        for &s in &family {
            for e in s.iter() {
                if family.binary_search(&s.without(e)).is_err() {
                    return Err(Error::InvalidConstraint(format!(
                        "family is not downward-closed: {s:?} is listed but {:?} is not",
                        s.without(e)
                    )));
                }
            }
        }
        Ok(ExplicitSystem { family, p })
    }

    /// Independent sets in ascending mask order.
    pub fn family(&self) -> &[ItemSet] {
        &self.family
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn is_independent(&self, set: ItemSet) -> bool {
        self.family.binary_search(&set).is_ok()
    }
}

/// An independence system `(E, I)` with its declared `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstraintSystem {
    Cardinality { k: usize },
    Partition(PartitionMatroid),
    Explicit(ExplicitSystem),
}

/// Outcome of [`ConstraintSystem::verify_p_system`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PSystemCheck {
    pub p: usize,
    pub holds: bool,
    /// First `R` (ascending mask order) whose bases violate the bound.
    pub counterexample: Option<PSystemViolation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PSystemViolation {
    pub set: ItemSet,
    pub min_base: usize,
    pub max_base: usize,
}

impl ConstraintSystem {
    pub fn cardinality(k: usize) -> Self {
        ConstraintSystem::Cardinality { k }
    }

    pub fn partition(blocks: Vec<ItemSet>, limits: Vec<usize>) -> Result<Self> {
        Ok(ConstraintSystem::Partition(PartitionMatroid::new(blocks, limits)?))
    }

    pub fn explicit(sets: impl IntoIterator<Item = ItemSet>, p: usize) -> Result<Self> {
        Ok(ConstraintSystem::Explicit(ExplicitSystem::new(sets, p)?))
    }

    /// The family of sets independent in both `a` and `b`, over `n` items,
    /// declared as a `p`-system.
    pub fn intersection(a: &Self, b: &Self, n: usize, p: usize) -> Result<Self> {
        if n > MAX_EXHAUSTIVE_ITEMS {
            return Err(Error::GroundSetTooLarge {
                n,
                max: MAX_EXHAUSTIVE_ITEMS,
            });
        }
        let sets = ItemSet::full(n)
            .subsets()
            .filter(|&s| a.is_independent(s) && b.is_independent(s));
        Self::explicit(sets, p)
    }

    pub fn from_descriptor(d: &ConstraintDescriptor) -> Result<Self> {
        let to_set = |items: &[usize]| -> Result<ItemSet> {
            if let Some(&bad) = items.iter().find(|&&i| i >= MAX_ITEMS) {
                return Err(Error::InvalidConstraint(format!("item {bad} out of range")));
            }
            let set: ItemSet = items.iter().map(|&i| ItemId(i)).collect();
            if set.len() != items.len() {
                return Err(Error::InvalidConstraint(format!("repeated item in {items:?}")));
            }
            Ok(set)
        };
        match d {
            ConstraintDescriptor::Cardinality { k } => Ok(Self::cardinality(*k)),
            ConstraintDescriptor::Partition { blocks, limits } => {
                let blocks = blocks.iter().map(|b| to_set(b)).collect::<Result<_>>()?;
                Self::partition(blocks, limits.clone())
            }
            ConstraintDescriptor::Explicit {
                independent_sets,
                p,
            } => {
                let sets = independent_sets
                    .iter()
                    .map(|s| to_set(s))
                    .collect::<Result<Vec<_>>>()?;
                Self::explicit(sets, *p)
            }
        }
    }

    pub fn descriptor(&self) -> ConstraintDescriptor {
        let to_vec = |s: &ItemSet| s.iter().map(|e| e.0).collect::<Vec<_>>();
        match self {
            ConstraintSystem::Cardinality { k } => ConstraintDescriptor::Cardinality { k: *k },
            ConstraintSystem::Partition(pm) => ConstraintDescriptor::Partition {
                blocks: pm.blocks.iter().map(to_vec).collect(),
                limits: pm.limits.clone(),
            },
            ConstraintSystem::Explicit(ex) => ConstraintDescriptor::Explicit {
                independent_sets: ex.family.iter().map(to_vec).collect(),
                p: ex.p,
            },
        }
    }

    /// Rejects constraints that mention items outside `0..n`.
    pub fn validate_for(&self, n: usize) -> Result<()> {
        let ground = ItemSet::full(n.min(MAX_ITEMS));
        let mentioned = match self {
            ConstraintSystem::Cardinality { .. } => ItemSet::EMPTY,
            ConstraintSystem::Partition(pm) => pm.selectable(),
            ConstraintSystem::Explicit(ex) => {
                ex.family.iter().fold(ItemSet::EMPTY, |acc, s| acc.union(*s))
            }
        };
        if !mentioned.is_subset(ground) {
            return Err(Error::InvalidConstraint(format!(
                "constraint mentions items outside the {n}-item ground set"
            )));
        }
        Ok(())
    }

    /// The declared `p`: 1 for cardinality and partition matroids.
    pub fn p(&self) -> usize {
        match self {
            ConstraintSystem::Explicit(ex) => ex.p,
            _ => 1,
        }
    }

    pub fn as_partition(&self) -> Option<&PartitionMatroid> {
        match self {
            ConstraintSystem::Partition(pm) => Some(pm),
            _ => None,
        }
    }

    pub fn is_independent(&self, set: ItemSet) -> bool {
        match self {
            ConstraintSystem::Cardinality { k } => set.len() <= *k,
            ConstraintSystem::Partition(pm) => pm.is_independent(set),
            ConstraintSystem::Explicit(ex) => ex.is_independent(set),
        }
    }

    /// Items `e ∉ base` with `base ∪ {e}` independent.
    pub fn extensions_of(&self, n: usize, base: ItemSet) -> Result<ItemSet> {
        if !self.is_independent(base) {
            return Err(Error::InfeasibleBase);
        }
        Ok(ItemSet::full(n)
            .difference(base)
            .iter()
            .filter(|&e| self.is_independent(base.with(e)))
            .collect())
    }

    /// `V = {e ∉ dom ψ : dom ψ ∪ {e} ∈ I}`.
    pub fn feasible_extensions(&self, n: usize, psi: &PartialRealization) -> Result<ItemSet> {
        self.extensions_of(n, psi.dom())
    }

    /// Exhaustively checks `p · min base(R) ≥ max base(R)` for every
    /// `R ⊆ {0..n-1}`.
    pub fn verify_p_system(&self, p: usize, n: usize) -> Result<PSystemCheck> {
        if n > MAX_EXHAUSTIVE_ITEMS {
            return Err(Error::GroundSetTooLarge {
                n,
                max: MAX_EXHAUSTIVE_ITEMS,
            });
        }
        let ground = ItemSet::full(n);
        let size = 1usize << n;
        let mut min_base = vec![usize::MAX; size];
        let mut max_base = vec![0usize; size];
        // I is a base of R exactly when I ⊆ R and R avoids every feasible
        // extension of I, so each independent I updates the sets
        // R = I ∪ T with T ranging over the items that cannot extend I.
        for indep in ground.subsets().filter(|&s| self.is_independent(s)) {
            let ext = self.extensions_of(n, indep)?;
            let free = ground.difference(indep).difference(ext);
            let b = indep.len();
            for t in free.subsets() {
                let r = indep.union(t).bits() as usize;
                min_base[r] = min_base[r].min(b);
                max_base[r] = max_base[r].max(b);
            }
        }
        let counterexample = (0..size).find_map(|r| {
            (p * min_base[r] < max_base[r]).then(|| PSystemViolation {
                set: ItemSet::from_bits(r as u64),
                min_base: min_base[r],
                max_base: max_base[r],
            })
        });
        Ok(PSystemCheck {
            p,
            holds: counterexample.is_none(),
            counterexample,
        })
    }
}

impl Serialize for ConstraintSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.descriptor().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConstraintSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let desc = ConstraintDescriptor::deserialize(d)?;
        ConstraintSystem::from_descriptor(&desc).map_err(serde::de::Error::custom)
    }
}
