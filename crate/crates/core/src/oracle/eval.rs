use rayon::prelude::*;
use serde::Serialize;

use super::solve::{opt_average_case, opt_worst_case};
use crate::constraints::ConstraintSystem;
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::policies::{DecisionCache, Environment, Policy, PolicyRun, StochasticWcGreedy};

/// A policy run against every realization of the prior support.
#[derive(Clone, Debug, Serialize)]
pub struct PolicyEvaluation {
    pub policy: String,
    /// `min_φ f(E(π, φ), φ)`.
    pub f_wc: f64,
    /// `E_Φ f(E(π, Φ), Φ)`.
    pub f_avg: f64,
    pub runs: Vec<PolicyRun>,
}

/// Runs `policy` once per support realization, sharing its decision cache.
pub fn evaluate_policy(inst: &Instance, policy: &dyn Policy) -> Result<PolicyEvaluation> {
    let mut cache = DecisionCache::new();
    let runs = (0..inst.prior().len())
        .map(|i| policy.run_cached(inst, &Environment::new(inst, i)?, &mut cache))
        .collect::<Result<Vec<_>>>()?;
    let f_wc = runs.iter().map(|r| r.utility).fold(f64::INFINITY, f64::min);
    let f_avg = runs
        .iter()
        .map(|r| inst.prior().prob(r.environment) * r.utility)
        .sum();
    Ok(PolicyEvaluation {
        policy: policy.name(),
        f_wc,
        f_avg,
        runs,
    })
}

/// A policy's values against the oracle optima.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RobustnessReport {
    pub policy: String,
    pub f_wc: f64,
    pub f_avg: f64,
    pub opt_wc: f64,
    pub opt_avg: f64,
    /// `f_wc / OPT_wc`; `None` when `OPT_wc = 0`.
    pub wc_ratio: Option<f64>,
    /// `f_avg / OPT_avg`; `None` when `OPT_avg = 0`.
    pub avg_ratio: Option<f64>,
    /// `α = min{wc_ratio, avg_ratio}`.
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    /// `α^β = min{β·wc_ratio, (1 − β)·avg_ratio}`.
    pub alpha_beta: Option<f64>,
    /// Set when some ratio is undefined because an optimum is zero.
    pub undefined: bool,
    /// Whether every run's selection is independent in the constraint.
    pub feasible: bool,
}

fn ratio(value: f64, opt: f64) -> Option<f64> {
    (opt != 0.0).then(|| value / opt)
}

impl RobustnessReport {
    /// Assembles the report from a policy evaluation and known optima.
    pub fn new(
        eval: &PolicyEvaluation,
        c: &ConstraintSystem,
        opt_wc: f64,
        opt_avg: f64,
        beta: Option<f64>,
    ) -> Result<Self> {
        if let Some(b) = beta {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::InvalidBeta(b));
            }
        }
        let wc_ratio = ratio(eval.f_wc, opt_wc);
        let avg_ratio = ratio(eval.f_avg, opt_avg);
        let both = wc_ratio.zip(avg_ratio);
        Ok(RobustnessReport {
            policy: eval.policy.clone(),
            f_wc: eval.f_wc,
            f_avg: eval.f_avg,
            opt_wc,
            opt_avg,
            wc_ratio,
            avg_ratio,
            alpha: both.map(|(w, a)| w.min(a)),
            beta,
            alpha_beta: beta.and_then(|b| both.map(|(w, a)| (b * w).min((1.0 - b) * a))),
            undefined: both.is_none(),
            feasible: eval.runs.iter().all(|r| c.is_independent(r.selected)),
        })
    }
}

/// Exact robustness report: runs `policy` on every realization and divides
/// by both oracle optima under `c`.
pub fn eval_exact(
    inst: &Instance,
    c: &ConstraintSystem,
    policy: &dyn Policy,
    beta: Option<f64>,
) -> Result<RobustnessReport> {
    let opt_wc = opt_worst_case(inst, c)?.value;
    let opt_avg = opt_average_case(inst, c)?.value;
    RobustnessReport::new(&evaluate_policy(inst, policy)?, c, opt_wc, opt_avg, beta)
}

/// Monte-Carlo estimate of the expected worst-case value of the sampled
/// greedy policy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectedWc {
    /// `min_φ` of the per-realization mean utility.
    pub estimate: f64,
    /// 95% normal-approximation half-width of the minimizing mean.
    pub half_width: f64,
    /// Support index attaining the minimum.
    pub worst_realization: usize,
    /// Mean utility per support realization.
    pub means: Vec<f64>,
    /// Largest number of candidate evaluations in any single run.
    pub max_evaluations: usize,
}

/// Runs the sampled worst-case greedy with seeds `seed, seed + 1, .., seed + R − 1` against
/// every support realization.
pub fn eval_expected_wc(
    inst: &Instance,
    k: usize,
    eps: f64,
    repetitions: usize,
    seed: u64,
) -> Result<ExpectedWc> {
    if repetitions < 30 {
        return Err(Error::InvalidArgument(format!(
            "need at least 30 repetitions, got {repetitions}"
        )));
    }
    let base = StochasticWcGreedy::new(k, eps, seed)?;
    let per_realization = (0..inst.prior().len())
        .into_par_iter()
        .map(|i| {
            let env = Environment::new(inst, i)?;
            let mut cache = DecisionCache::new();
            let mut utilities = Vec::with_capacity(repetitions);
            let mut max_evaluations = 0;
            for r in 0..repetitions {
                let policy = base.with_seed(seed.wrapping_add(r as u64));
                let run = policy.run_cached(inst, &env, &mut cache)?;
                max_evaluations = max_evaluations.max(run.evaluations);
                utilities.push(run.utility);
            }
            let mean = utilities.iter().sum::<f64>() / repetitions as f64;
            let constant = utilities.iter().all(|u| *u == utilities[0]);
            let var = if constant {
                0.0
            } else {
                utilities.iter().map(|u| (u - mean).powi(2)).sum::<f64>()
                    / (repetitions - 1) as f64
            };
            let half = 1.96 * var.sqrt() / (repetitions as f64).sqrt();
            Ok((mean, half, max_evaluations))
        })
        .collect::<Result<Vec<_>>>()?;
    let (worst, &(estimate, half_width, _)) = per_realization
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .expect("prior support is non-empty");
    Ok(ExpectedWc {
        estimate,
        half_width,
        worst_realization: worst,
        means: per_realization.iter().map(|p| p.0).collect(),
        max_evaluations: per_realization.iter().map(|p| p.2).max().unwrap_or(0),
    })
}
