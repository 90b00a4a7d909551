use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DecisionCache, Environment, Policy, PolicyRun, Rule, Step, TIE_TOLERANCE};
use crate::error::{Error, Result};
use crate::model::{Instance, ItemId, PartialRealization};

/// `min(n, ⌈(n/k)·ln(1/eps)⌉)`.
pub fn sample_size(n: usize, k: usize, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidEps(eps));
    }
    if k == 0 {
        return Ok(0);
    }
    let raw = (n as f64 / k as f64) * (1.0 / eps).ln();
    Ok(if raw >= n as f64 { n } else { raw.ceil() as usize })
}

/// Sampled worst-case greedy: each of `k` rounds samples a candidate set without
/// replacement from the unselected items and picks its best worst-case
/// marginal. The sampling stream is ChaCha8 seeded from `seed`.
#[derive(Clone, Debug)]
pub struct StochasticWcGreedy {
    k: usize,
    eps: f64,
    seed: u64,
}

impl StochasticWcGreedy {
    pub fn new(k: usize, eps: f64, seed: u64) -> Result<Self> {
        sample_size(1, 1, eps)?;
        Ok(StochasticWcGreedy { k, eps, seed })
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        StochasticWcGreedy { seed, ..self.clone() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl Policy for StochasticWcGreedy {
    fn name(&self) -> String {
        "stoch-wc".into()
    }

    /// Decisions depend on the sampling stream, so only the leaf values in
    /// `cache` are reused.
    fn run_cached(
        &self,
        inst: &Instance,
        env: &Environment<'_>,
        cache: &mut DecisionCache,
    ) -> Result<PolicyRun> {
        let n = inst.n();
        if self.k > n {
            return Err(Error::InvalidArgument(format!(
                "cardinality {} exceeds the {n} items",
                self.k
            )));
        }
        let size = sample_size(n, self.k, self.eps)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut psi = PartialRealization::new();
        let mut steps = Vec::new();
        let mut evaluations = 0;
        for _ in 0..self.k {
            let remaining: Vec<ItemId> = inst.ground_set().difference(psi.dom()).to_vec();
            if remaining.is_empty() || size == 0 {
                break;
            }
            let mut sample: Vec<ItemId> = index::sample(&mut rng, remaining.len(), size.min(remaining.len()))
                .into_iter()
                .map(|i| remaining[i])
                .collect();
            sample.sort();
            let post = inst.posterior(&psi)?;
            let mut best: Option<(ItemId, f64)> = None;
            for &e in &sample {
                let m = Rule::WorstCase.marginal(&post, e)?;
                if best.is_none_or(|(_, b)| m > b + TIE_TOLERANCE) {
                    best = Some((e, m));
                }
            }
            evaluations += sample.len();
            let (item, marginal) = best.expect("sample is non-empty");
            let state = env.reveal(item);
            psi.insert(item, state)?;
            steps.push(Step {
                item,
                state,
                marginal,
                stage: 0,
            });
        }
        let utility = cache.leaf(inst, &psi, env.index())?;
        Ok(PolicyRun {
            policy: self.name(),
            environment: env.index(),
            steps,
            selected: psi.dom(),
            observation: psi,
            utility,
            evaluations,
        })
    }
}
