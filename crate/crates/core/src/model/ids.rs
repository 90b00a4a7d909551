use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest ground set an [`ItemSet`] can hold.
pub const MAX_ITEMS: usize = 64;

/// An item of the ground set `{0, .., n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemId(pub usize);

impl ItemId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A state label in `{0, .., |O|-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State(pub usize);

impl State {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}

/// A subset of the ground set, stored as a 64-bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemSet(u64);

impl ItemSet {
    pub const EMPTY: ItemSet = ItemSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ItemSet(bits)
    }

    /// All items `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_ITEMS);
        if n == MAX_ITEMS {
            ItemSet(u64::MAX)
        } else {
            ItemSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(e: ItemId) -> Self {
        ItemSet(1u64 << e.0)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: ItemId) -> bool {
        e.0 < MAX_ITEMS && self.0 & (1u64 << e.0) != 0
    }

    pub fn with(self, e: ItemId) -> Self {
        ItemSet(self.0 | (1u64 << e.0))
    }

    pub fn without(self, e: ItemId) -> Self {
        ItemSet(self.0 & !(1u64 << e.0))
    }

    pub fn insert(&mut self, e: ItemId) {
        self.0 |= 1u64 << e.0;
    }

    pub fn union(self, other: ItemSet) -> Self {
        ItemSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ItemSet) -> Self {
        ItemSet(self.0 & other.0)
    }

    pub fn difference(self, other: ItemSet) -> Self {
        ItemSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: ItemSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Items in ascending order.
    pub fn iter(self) -> impl Iterator<Item = ItemId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(ItemId(i))
            }
        })
    }

    /// Every subset of `self`, in ascending mask order.
    pub fn subsets(self) -> impl Iterator<Item = ItemSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(ItemSet(cur))
        })
    }

    pub fn to_vec(self) -> Vec<ItemId> {
        self.iter().collect()
    }
}

impl FromIterator<ItemId> for ItemSet {
    fn from_iter<I: IntoIterator<Item = ItemId>>(iter: I) -> Self {
        let mut s = ItemSet::EMPTY;
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|e| e.0)).finish()
    }
}

impl Serialize for ItemSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ItemSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let items = Vec::<usize>::deserialize(d)?;
        if let Some(&bad) = items.iter().find(|&&i| i >= MAX_ITEMS) {
            return Err(serde::de::Error::custom(format!(
                "item {bad} exceeds the {MAX_ITEMS}-item limit"
            )));
        }
        Ok(items.into_iter().map(ItemId).collect())
    }
}
