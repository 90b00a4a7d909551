//! Average-case comparison of the greedy policies on random active-learning
//! instances, swept over the cardinality budget.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::applications::{build_active_learning, random_hypothesis_space, LabelMode};
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::oracle::evaluate_policy;
use crate::policies::{GreedyPolicy, Policy};

/// The three policies compared in the sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExperimentPolicy {
    /// Average-case greedy with budget `k`.
    AP,
    /// Worst-case greedy with budget `k`.
    WP,
    /// Hybrid with `q = 1/2`.
    HP,
}

impl ExperimentPolicy {
    pub fn build(self, k: usize) -> Result<Box<dyn Policy>> {
        Ok(match self {
            ExperimentPolicy::AP => Box::new(GreedyPolicy::avg(k, None)),
            ExperimentPolicy::WP => Box::new(GreedyPolicy::wc_cardinality(k, k)?),
            ExperimentPolicy::HP => Box::new(GreedyPolicy::hybrid_cardinality(k, 0.5)?),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Labels {
    Uniform(usize),
    Mixed,
}

impl From<Labels> for LabelMode {
    fn from(l: Labels) -> Self {
        match l {
            Labels::Uniform(n) => LabelMode::Uniform(n),
            Labels::Mixed => LabelMode::Mixed,
        }
    }
}

/// A sweep over `k_min..=k_max`. Repetition `r` draws its instance from
/// seed `seed + r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub points: usize,
    pub hypotheses: usize,
    pub labels: Labels,
    pub k_min: usize,
    pub k_max: usize,
    pub policies: Vec<ExperimentPolicy>,
    pub repetitions: usize,
    pub seed: u64,
    #[serde(default = "default_cap")]
    pub support_cap: usize,
}

fn default_cap() -> usize {
    crate::applications::DEFAULT_SUPPORT_CAP
}

impl ExperimentConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.policies.is_empty() {
            return Err(Error::InvalidArgument("policy list is empty".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument("repetitions must be at least 1".into()));
        }
        if self.k_min < 1 || self.k_min > self.k_max || self.k_max > n {
            return Err(Error::InvalidArgument(format!(
                "k range {}..={} must lie within 1..={n}",
                self.k_min, self.k_max
            )));
        }
        Ok(())
    }
}

/// One CSV row: repetition-averaged values of one policy at one `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub k: usize,
    pub policy: ExperimentPolicy,
    pub f_avg: f64,
    pub f_wc: f64,
    pub repetitions: usize,
}

/// Runs every `(k, policy)` cell on each instance and averages over the
/// instances. Rows are sorted by `k`, then policy.
pub fn sweep(
    instances: &[Instance],
    ks: std::ops::RangeInclusive<usize>,
    policies: &[ExperimentPolicy],
) -> Result<Vec<ExperimentRow>> {
    let cells: Vec<(usize, ExperimentPolicy, usize)> = ks
        .flat_map(|k| {
            policies
                .iter()
                .flat_map(move |&p| (0..instances.len()).map(move |r| (k, p, r)))
        })
        .collect();
    let values = cells
        .par_iter()
        .map(|&(k, p, r)| {
            let eval = evaluate_policy(&instances[r], p.build(k)?.as_ref())?;
            Ok(((k, p), (eval.f_avg, eval.f_wc)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<ExperimentRow> = Vec::new();
    for ((k, policy), (f_avg, f_wc)) in values {
        match rows.iter_mut().find(|row| row.k == k && row.policy == policy) {
            Some(row) => {
                row.f_avg += f_avg;
                row.f_wc += f_wc;
                row.repetitions += 1;
            }
            None => rows.push(ExperimentRow {
                k,
                policy,
                f_avg,
                f_wc,
                repetitions: 1,
            }),
        }
    }
    for row in &mut rows {
        row.f_avg /= row.repetitions as f64;
        row.f_wc /= row.repetitions as f64;
    }
    rows.sort_by_key(|r| (r.k, r.policy));
    Ok(rows)
}

/// The instance of repetition `rep`.
pub fn generate_instance(cfg: &ExperimentConfig, rep: usize) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(rep as u64));
    let hs = random_hypothesis_space(&mut rng, cfg.points, cfg.hypotheses, cfg.labels.into())?;
    build_active_learning(&hs, cfg.support_cap)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>> {
    cfg.validate(cfg.points)?;
    let instances = (0..cfg.repetitions)
        .into_par_iter()
        .map(|r| generate_instance(cfg, r))
        .collect::<Result<Vec<_>>>()?;
    sweep(&instances, cfg.k_min..=cfg.k_max, &cfg.policies)
}
