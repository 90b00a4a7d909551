use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{
    Instance, ItemSet, Prior, Realization, RealizationRef, UtilityDescriptor, UtilityModel,
};

/// Candidate hypotheses over a pool of data points, with unnormalized
/// weights `q_h`.
#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisSpace {
    labels: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

impl HypothesisSpace {
    pub fn new(labels: Vec<Vec<usize>>, weights: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyHypothesisSpace);
        }
        if labels.len() != weights.len() {
            return Err(Error::InvalidInstance(format!(
                "{} hypotheses but {} weights",
                labels.len(),
                weights.len()
            )));
        }
        let n = labels[0].len();
        if labels.iter().any(|l| l.len() != n) {
            return Err(Error::InvalidInstance(
                "hypotheses label different numbers of points".into(),
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidInstance(format!("hypothesis weight {w} is not positive")));
        }
        Ok(HypothesisSpace { labels, weights })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of data points.
    pub fn n(&self) -> usize {
        self.labels[0].len()
    }

    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Size of the label alphabet actually used.
    pub fn num_labels(&self) -> usize {
        self.labels.iter().flatten().max().map_or(1, |&m| m + 1)
    }

    /// `p_H(h) = q_h / Σ q`.
    pub fn probabilities(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| w / total).collect()
    }
}

/// How many labels each data point can take in a random hypothesis space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelMode {
    /// Every point has the same number of labels.
    Uniform(usize),
    /// Points are shuffled into groups of 80% binary, 10% ternary and 10%
    /// four-label points.
    Mixed,
}

/// Labels drawn uniformly per point and weights `q_h ~ U(0, 1)`.
pub fn random_hypothesis_space<R: Rng>(
    rng: &mut R,
    n: usize,
    hypotheses: usize,
    mode: LabelMode,
) -> Result<HypothesisSpace> {
    if hypotheses == 0 {
        return Err(Error::EmptyHypothesisSpace);
    }
    let alphabet: Vec<usize> = match mode {
        LabelMode::Uniform(l) => {
            if l == 0 {
                return Err(Error::InvalidArgument("label alphabet is empty".into()));
            }
            vec![l; n]
        }
        LabelMode::Mixed => {
            let ternary = n / 10;
            let quaternary = n / 10;
            let mut sizes: Vec<usize> = (0..n)
                .map(|i| {
                    if i < n - ternary - quaternary {
                        2
                    } else if i < n - quaternary {
                        3
                    } else {
                        4
                    }
                })
                .collect();
            // Fisher-Yates so the label sizes land on random points.
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                sizes.swap(i, j);
            }
            sizes
        }
    };
    let labels = (0..hypotheses)
        .map(|_| alphabet.iter().map(|&l| rng.gen_range(0..l)).collect())
        .collect();
    let weights = (0..hypotheses)
        .map(|_| loop {
            let q: f64 = rng.gen();
            if q > 0.0 {
                break q;
            }
        })
        .collect();
    HypothesisSpace::new(labels, weights)
}

/// Version-space reduction `f(S, φ) = 1 − p_H(H(φ(S)))`.
#[derive(Clone, Debug)]
pub struct ActiveLearningUtility {
    hypotheses: HypothesisSpace,
    /// Realizations (merged label vectors) and their probabilities.
    support: Vec<(Vec<usize>, f64)>,
}

impl UtilityModel for ActiveLearningUtility {
    fn value(&self, set: ItemSet, phi: RealizationRef<'_>) -> f64 {
        let own = &self.support[phi.index].0;
        let mass: f64 = self
            .support
            .iter()
            .filter(|(labels, _)| set.iter().all(|e| labels[e.0] == own[e.0]))
            .map(|(_, p)| p)
            .sum();
        (1.0 - mass).max(0.0)
    }

    /// The class is exactly the surviving version space.
    fn class_value(&self, _set: ItemSet, class: &[usize], prior: &Prior) -> Option<f64> {
        let mass: f64 = class.iter().map(|&i| prior.prob(i)).sum();
        Some((1.0 - mass).max(0.0))
    }

    fn claims_minimal_dependency(&self) -> bool {
        true
    }

    fn descriptor(&self) -> Option<UtilityDescriptor> {
        Some(UtilityDescriptor::ActiveLearning {
            labels: self.hypotheses.labels.clone(),
            weights: self.hypotheses.weights.clone(),
        })
    }
}

/// Items are data points; one realization per distinct label vector, with
/// the summed probability of the hypotheses sharing it.
pub fn build_active_learning(hs: &HypothesisSpace, support_cap: usize) -> Result<Instance> {
    let probs = hs.probabilities();
    let mut order: Vec<Vec<usize>> = Vec::new();
    let mut merged: HashMap<&[usize], f64> = HashMap::new();
    for (labels, p) in hs.labels.iter().zip(&probs) {
        let slot = merged.entry(labels.as_slice()).or_insert_with(|| {
            order.push(labels.clone());
            0.0
        });
        *slot += p;
    }
    if order.len() > support_cap {
        return Err(Error::SupportTooLarge {
            size: order.len() as u128,
            cap: support_cap,
        });
    }
    let support: Vec<(Vec<usize>, f64)> = order
        .into_iter()
        .map(|l| {
            let p = merged[l.as_slice()];
            (l, p)
        })
        .collect();
    let prior = Prior::new(
        support
            .iter()
            .map(|(l, p)| (Realization::from_labels(l.iter().copied()), *p))
            .collect(),
    )?;
    let utility = ActiveLearningUtility {
        hypotheses: hs.clone(),
        support,
    };
    Instance::from_model(hs.num_labels(), prior, utility)
}
