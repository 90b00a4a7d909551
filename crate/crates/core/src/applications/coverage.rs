use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{
    CoverOutcome, Instance, ItemSet, Prior, Realization, RealizationRef, UtilityDescriptor,
    UtilityModel, MAX_ITEMS, PROB_SUM_SLACK,
};

/// Materializes the product of independent per-item state distributions,
/// first item varying slowest.
fn product_support(per_item: &[Vec<f64>], support_cap: usize) -> Result<Vec<(Vec<usize>, f64)>> {
    let size = per_item
        .iter()
        .try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128))
        .unwrap_or(u128::MAX);
    if size > support_cap as u128 {
        return Err(Error::SupportTooLarge {
            size,
            cap: support_cap,
        });
    }
    let mut out = vec![(Vec::with_capacity(per_item.len()), 1.0)];
    for probs in per_item {
        out = out
            .into_iter()
            .flat_map(|(states, p)| {
                probs.iter().enumerate().map(move |(o, q)| {
                    let mut next = states.clone();
                    next.push(o);
                    (next, p * q)
                })
            })
            .collect();
    }
    Ok(out)
}

fn check_distribution(item: usize, probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidInstance(format!("item {item} has no possible state")));
    }
    if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::InvalidInstance(format!(
            "item {item} has state probability {p}; states must have positive probability"
        )));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_SLACK {
        return Err(Error::InvalidInstance(format!(
            "item {item} state probabilities sum to {sum}"
        )));
    }
    Ok(())
}

/// Stochastic maximum coverage: `f(S, φ)` is the (weighted) size of the
/// union of the subsets the items of `S` turned out to cover.
#[derive(Clone, Debug)]
pub struct CoverageUtility {
    universe: usize,
    items: Vec<Vec<CoverOutcome>>,
    element_weights: Option<Vec<f64>>,
    /// `masks[e][o]`: bitset of the elements item `e` covers in state `o`.
    masks: Vec<Vec<Vec<u64>>>,
}

impl UtilityModel for CoverageUtility {
    fn value(&self, set: ItemSet, phi: RealizationRef<'_>) -> f64 {
        let words = self.universe.div_ceil(64);
        let mut covered = vec![0u64; words];
        for e in set.iter() {
            let mask = &self.masks[e.0][phi.phi.state(e).0];
            for (c, m) in covered.iter_mut().zip(mask) {
                *c |= m;
            }
        }
        match &self.element_weights {
            None => covered.iter().map(|w| w.count_ones() as f64).sum(),
            Some(weights) => (0..self.universe)
                .filter(|&x| covered[x / 64] >> (x % 64) & 1 == 1)
                .map(|x| weights[x])
                .sum(),
        }
    }

    fn claims_minimal_dependency(&self) -> bool {
        true
    }

    fn descriptor(&self) -> Option<UtilityDescriptor> {
        Some(UtilityDescriptor::Coverage {
            universe: self.universe,
            items: self.items.clone(),
            element_weights: self.element_weights.clone(),
        })
    }
}

/// Item `e`'s state indexes `items[e]`; states are independent across
/// items. `element_weights` defaults to 1 per element; weighted private
/// singletons give the modular (match-making) special case.
pub fn build_stochastic_coverage(
    universe: usize,
    items: Vec<Vec<CoverOutcome>>,
    element_weights: Option<Vec<f64>>,
    support_cap: usize,
) -> Result<Instance> {
    if items.is_empty() || items.len() > MAX_ITEMS {
        return Err(Error::InvalidInstance(format!(
            "coverage needs 1..={MAX_ITEMS} items, got {}",
            items.len()
        )));
    }
    if let Some(w) = &element_weights {
        if w.len() != universe {
            return Err(Error::InvalidInstance(format!(
                "{} element weights for a universe of {universe}",
                w.len()
            )));
        }
        if let Some(x) = w.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidInstance(format!("element weight {x} is negative")));
        }
    }
    let words = universe.div_ceil(64);
    let mut masks = Vec::with_capacity(items.len());
    for (e, outcomes) in items.iter().enumerate() {
        check_distribution(e, &outcomes.iter().map(|o| o.prob).collect::<Vec<_>>())?;
        let mut per_state = Vec::with_capacity(outcomes.len());
        for o in outcomes {
            let mut mask = vec![0u64; words];
            for &x in &o.covers {
                if x >= universe {
                    return Err(Error::InvalidInstance(format!(
                        "item {e} covers element {x} outside the universe of {universe}"
                    )));
                }
                mask[x / 64] |= 1u64 << (x % 64);
            }
            per_state.push(mask);
        }
        masks.push(per_state);
    }
    let per_item: Vec<Vec<f64>> = items
        .iter()
        .map(|o| o.iter().map(|c| c.prob).collect())
        .collect();
    let support = product_support(&per_item, support_cap)?;
    let num_states = items.iter().map(Vec::len).max().unwrap_or(1);
    let prior = Prior::new(
        support
            .into_iter()
            .map(|(s, p)| (Realization::from_labels(s), p))
            .collect(),
    )?;
    Instance::from_model(
        num_states,
        prior,
        CoverageUtility {
            universe,
            items,
            element_weights,
            masks,
        },
    )
}

/// Each item gets `states` equally likely random subsets; each element is
/// included with probability `density`.
pub fn random_coverage<R: Rng>(
    rng: &mut R,
    items: usize,
    universe: usize,
    states: usize,
    density: f64,
    support_cap: usize,
) -> Result<Instance> {
    let outcomes = (0..items)
        .map(|_| {
            (0..states)
                .map(|_| CoverOutcome {
                    covers: (0..universe).filter(|_| rng.gen::<f64>() < density).collect(),
                    prob: 1.0 / states as f64,
                })
                .collect()
        })
        .collect();
    build_stochastic_coverage(universe, outcomes, None, support_cap)
}

/// Unreliable sensors. `f(S, φ) = Σ_l max_{s ∈ S working} weights[s][l]`,
/// a monotone submodular coverage of the working sensors.
#[derive(Clone, Debug)]
pub struct SensorUtility {
    weights: Vec<Vec<f64>>,
    failure: Vec<f64>,
    /// `working[s][o]`: whether state `o` of sensor `s` means working.
    working: Vec<Vec<bool>>,
}

impl UtilityModel for SensorUtility {
    fn value(&self, set: ItemSet, phi: RealizationRef<'_>) -> f64 {
        let locations = self.weights.first().map_or(0, Vec::len);
        let active: Vec<usize> = set
            .iter()
            .filter(|&s| self.working[s.0][phi.phi.state(s).0])
            .map(|s| s.0)
            .collect();
        (0..locations)
            .map(|l| {
                active
                    .iter()
                    .map(|&s| self.weights[s][l])
                    .fold(0.0, f64::max)
            })
            .sum()
    }

    fn claims_minimal_dependency(&self) -> bool {
        true
    }

    fn descriptor(&self) -> Option<UtilityDescriptor> {
        Some(UtilityDescriptor::Sensors {
            weights: self.weights.clone(),
            failure: self.failure.clone(),
        })
    }
}

/// States are `working` then `failed`, keeping only those with positive
/// probability; sensors fail independently.
pub fn build_sensor_selection(
    weights: Vec<Vec<f64>>,
    failure: Vec<f64>,
    support_cap: usize,
) -> Result<Instance> {
    if weights.is_empty() || weights.len() > MAX_ITEMS {
        return Err(Error::InvalidInstance(format!(
            "sensor selection needs 1..={MAX_ITEMS} sensors, got {}",
            weights.len()
        )));
    }
    if weights.len() != failure.len() {
        return Err(Error::InvalidInstance(format!(
            "{} sensors but {} failure probabilities",
            weights.len(),
            failure.len()
        )));
    }
    let locations = weights[0].len();
    for (s, row) in weights.iter().enumerate() {
        if row.len() != locations {
            return Err(Error::InvalidInstance(format!(
                "sensor {s} has {} location weights, expected {locations}",
                row.len()
            )));
        }
        if let Some(w) = row.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidInstance(format!("sensor {s} has weight {w}")));
        }
    }
    let mut per_item = Vec::with_capacity(failure.len());
    let mut working = Vec::with_capacity(failure.len());
    for (s, &f) in failure.iter().enumerate() {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::InvalidInstance(format!(
                "sensor {s} failure probability {f} outside [0, 1]"
            )));
        }
        let mut probs = Vec::new();
        let mut flags = Vec::new();
        if f < 1.0 {
            probs.push(1.0 - f);
            flags.push(true);
        }
        if f > 0.0 {
            probs.push(f);
            flags.push(false);
        }
        per_item.push(probs);
        working.push(flags);
    }
    let support = product_support(&per_item, support_cap)?;
    let num_states = per_item.iter().map(Vec::len).max().unwrap_or(1);
    let prior = Prior::new(
        support
            .into_iter()
            .map(|(s, p)| (Realization::from_labels(s), p))
            .collect(),
    )?;
    Instance::from_model(
        num_states,
        prior,
        SensorUtility {
            weights,
            failure,
            working,
        },
    )
}

/// Random location weights in `[0, 1)` and failure probabilities drawn
/// from `(0, max_failure)`.
pub fn random_sensors<R: Rng>(
    rng: &mut R,
    sensors: usize,
    locations: usize,
    max_failure: f64,
    support_cap: usize,
) -> Result<Instance> {
    let weights = (0..sensors)
        .map(|_| (0..locations).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let failure = (0..sensors)
        .map(|_| rng.gen::<f64>() * max_failure)
        .collect();
    build_sensor_selection(weights, failure, support_cap)
}
