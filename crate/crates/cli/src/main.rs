//! `rasm`: generate instances, run policies, compare them against the
//! oracle, check structural properties and sweep experiments.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use robust_asm::applications::{
    build_active_learning, build_viral_marketing, counterexample, random_coverage, random_graph,
    random_hypothesis_space, random_sensors, LabelMode,
};
use robust_asm::constraints::ConstraintSystem;
use robust_asm::experiment::{run_experiment, ExperimentConfig, ExperimentPolicy, Labels};
use robust_asm::io::{read_instance, write_instance, InstanceFile};
use robust_asm::model::Instance;
use robust_asm::oracle::{evaluate_policy, Objective, Oracle, RobustnessReport};
use robust_asm::policies::{Environment, Policy, PolicyDescriptor, PolicyKind};
use robust_asm::properties::{Checker, Property};

#[derive(Parser)]
#[command(name = "rasm", version, about = "Robust adaptive submodular maximization toolkit")]
struct Cli {
    /// Seed for generators and sampled policies.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Numerical tolerance for property checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Largest prior support an instance may materialize.
    #[arg(long, global = true, default_value_t = robust_asm::applications::DEFAULT_SUPPORT_CAP)]
    support_cap: usize,
    /// Exit with status 4 when a property check fails.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Run a policy against one or all realizations.
    Run(RunArgs),
    /// Compare a policy with both oracle optima.
    Eval(EvalArgs),
    /// Check structural properties, one JSON line per property.
    Check(CheckArgs),
    /// Sweep the cardinality budget on random active-learning instances.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Counterexample,
    ActiveLearning,
    Viral,
    Coverage,
    Sensors,
}

#[derive(Args)]
struct GenArgs {
    generator: Generator,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Write the materialized table instead of the application descriptor.
    #[arg(long)]
    table: bool,
    /// Counterexample: value of the safe item.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Items: data points, nodes, coverage items or sensors.
    #[arg(long, short, default_value_t = 8)]
    n: usize,
    /// Active learning: number of hypotheses.
    #[arg(long, default_value_t = 16)]
    hypotheses: usize,
    /// Active learning: label alphabet size, or `mixed`.
    #[arg(long, default_value = "2")]
    labels: String,
    /// Viral and coverage: edge or membership density.
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    /// Viral: propagation probabilities to draw from.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1.0")]
    probs: Vec<f64>,
    /// Viral: cap on edges with uncertain status.
    #[arg(long, default_value_t = 8)]
    max_uncertain: usize,
    /// Coverage: universe size; sensors: number of locations.
    #[arg(long, default_value_t = 6)]
    universe: usize,
    /// Coverage: outcomes per item.
    #[arg(long, default_value_t = 2)]
    states: usize,
    /// Sensors: largest failure probability.
    #[arg(long, default_value_t = 0.5)]
    max_failure: f64,
}

#[derive(Args)]
struct PolicyArgs {
    /// Instance file.
    #[arg(long, short)]
    instance: PathBuf,
    /// Constraint as inline JSON or a path to a JSON file.
    #[arg(long, conflicts_with = "k")]
    constraint: Option<String>,
    /// Shorthand for a cardinality constraint.
    #[arg(long, short)]
    k: Option<usize>,
    /// Policy kind (e.g. `wc-card`, `hybrid-card`), `oracle-wc`, `oracle-avg`,
    /// or a JSON policy descriptor.
    #[arg(long, short)]
    policy: String,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    budget: Option<usize>,
    /// Oracle search-space cap.
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    policy: PolicyArgs,
    /// Realization index, or `all`.
    #[arg(long, default_value = "all")]
    env: String,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Args)]
struct CheckArgs {
    /// Instance file.
    #[arg(long, short)]
    instance: PathBuf,
    /// Properties to check; all of them when omitted.
    #[arg(long, short, value_delimiter = ',')]
    properties: Vec<String>,
    /// Cap on (ψ, ψ') pairs swept.
    #[arg(long)]
    cap: Option<u64>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment config; overrides the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    points: usize,
    #[arg(long, default_value_t = 100)]
    hypotheses: usize,
    /// Label alphabet size, or `mixed`.
    #[arg(long, default_value = "2")]
    labels: String,
    #[arg(long, default_value_t = 2)]
    k_min: usize,
    #[arg(long, default_value_t = 9)]
    k_max: usize,
    #[arg(long, value_delimiter = ',', default_value = "AP,WP,HP")]
    policies: Vec<String>,
    #[arg(long, default_value_t = 10)]
    repetitions: usize,
}

/// An error the user caused through arguments or input files.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Exit status for a property check that failed under `--strict`.
struct StrictFailure;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(StrictFailure)) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<robust_asm::Error>() {
            return if err.is_resource_cap() { 3 } else { 2 };
        }
        if cause.is::<Usage>() || cause.is::<serde_json::Error>() {
            return 2;
        }
    }
    1
}

fn dispatch(cli: &Cli) -> anyhow::Result<Option<StrictFailure>> {
    match &cli.command {
        Command::Gen(a) => gen(cli, a)?,
        Command::Run(a) => run(cli, a)?,
        Command::Eval(a) => eval(cli, a)?,
        Command::Check(a) => return check(cli, a),
        Command::Experiment(a) => experiment(cli, a)?,
    }
    Ok(None)
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn parse_labels(s: &str) -> anyhow::Result<Labels> {
    if s == "mixed" {
        return Ok(Labels::Mixed);
    }
    s.parse()
        .map(Labels::Uniform)
        .map_err(|_| usage(format!("labels must be a positive integer or 'mixed', got '{s}'")))
}

fn gen(cli: &Cli, a: &GenArgs) -> anyhow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let cap = cli.support_cap;
    let inst = match a.generator {
        Generator::Counterexample => counterexample(a.eps)?,
        Generator::ActiveLearning => {
            let mode = LabelMode::from(parse_labels(&a.labels)?);
            let hs = random_hypothesis_space(&mut rng, a.n, a.hypotheses, mode)?;
            build_active_learning(&hs, cap)?
        }
        Generator::Viral => {
            let g = random_graph(&mut rng, a.n, a.density, &a.probs, a.max_uncertain)?;
            build_viral_marketing(&g, cap)?
        }
        Generator::Coverage => random_coverage(&mut rng, a.n, a.universe, a.states, a.density, cap)?,
        Generator::Sensors => random_sensors(&mut rng, a.n, a.universe, a.max_failure, cap)?,
    };
    let mut json = if a.table {
        serde_json::to_string_pretty(&InstanceFile::materialized(&inst)?)?
    } else {
        write_instance(&inst)?
    };
    json.push('\n');
    emit(a.out.as_deref(), &json)
}

fn load_instance(path: &Path, cap: usize) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_instance(&text, cap).with_context(|| format!("loading {}", path.display()))
}

/// Inline JSON when the argument looks like an object, else a file path.
fn json_arg<T: serde::de::DeserializeOwned>(arg: &str) -> anyhow::Result<T> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    };
    Ok(serde_json::from_str(&text)?)
}

fn constraint(a: &PolicyArgs, n: usize) -> anyhow::Result<ConstraintSystem> {
    let c = match (&a.constraint, a.k) {
        (Some(s), _) => json_arg(s)?,
        (None, Some(k)) => ConstraintSystem::cardinality(k),
        (None, None) => bail!(usage("either --constraint or --k is required")),
    };
    c.validate_for(n)?;
    Ok(c)
}

enum Chosen {
    Oracle(Objective),
    Descriptor(PolicyDescriptor),
}

fn choose_policy(a: &PolicyArgs) -> anyhow::Result<Chosen> {
    let mut d = match a.policy.as_str() {
        "oracle-wc" => return Ok(Chosen::Oracle(Objective::WorstCase)),
        "oracle-avg" => return Ok(Chosen::Oracle(Objective::Average)),
        s if s.trim_start().starts_with('{') => serde_json::from_str(s)?,
        s => {
            let kind: PolicyKind = serde_json::from_value(serde_json::Value::from(s))
                .map_err(|_| usage(format!("unknown policy '{s}'")))?;
            PolicyDescriptor::new(kind)
        }
    };
    d.q = a.q.or(d.q);
    d.beta = a.beta.or(d.beta);
    d.eps = a.eps.or(d.eps);
    d.budget = a.budget.or(d.budget);
    Ok(Chosen::Descriptor(d))
}

fn oracle<'a>(inst: &'a Instance, c: &'a ConstraintSystem, cap: Option<u64>) -> Oracle<'a> {
    let o = Oracle::new(inst, c);
    match cap {
        Some(cap) => o.cap(cap),
        None => o,
    }
}

/// The policy, plus its descriptor with `k` and `q` filled in.
fn build_policy(
    cli: &Cli,
    a: &PolicyArgs,
    inst: &Instance,
    c: &ConstraintSystem,
) -> anyhow::Result<(Box<dyn Policy>, Option<PolicyDescriptor>)> {
    Ok(match choose_policy(a)? {
        Chosen::Oracle(objective) => (Box::new(oracle(inst, c, a.cap).solve(objective)?.tree), None),
        Chosen::Descriptor(mut d) => {
            let policy = d.build(c, cli.seed)?;
            if d.k.is_none() && !matches!(d.policy, PolicyKind::WcPsystem) {
                d.k = d.resolve_k(c).ok();
            }
            if matches!(
                d.policy,
                PolicyKind::HybridCard
                    | PolicyKind::MatroidWc
                    | PolicyKind::MatroidAvg
                    | PolicyKind::HybridMatroid
            ) {
                d.q = Some(d.resolve_q()?);
            }
            (policy, Some(d))
        }
    })
}

/// Pretty JSON of `value`, with the resolved descriptor attached.
fn with_descriptor<T: serde::Serialize>(
    value: &T,
    d: Option<&PolicyDescriptor>,
) -> anyhow::Result<String> {
    let mut v = serde_json::to_value(value)?;
    if let (Some(d), Some(obj)) = (d, v.as_object_mut()) {
        obj.insert("descriptor".into(), serde_json::to_value(d)?);
    }
    to_json(&v)
}

fn to_json<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn run(cli: &Cli, a: &RunArgs) -> anyhow::Result<()> {
    let inst = load_instance(&a.policy.instance, cli.support_cap)?;
    let c = constraint(&a.policy, inst.n())?;
    let (policy, d) = build_policy(cli, &a.policy, &inst, &c)?;
    let out = if a.env == "all" {
        with_descriptor(&evaluate_policy(&inst, policy.as_ref())?, d.as_ref())?
    } else {
        let i: usize = a
            .env
            .parse()
            .map_err(|_| usage(format!("--env must be an index or 'all', got '{}'", a.env)))?;
        with_descriptor(&policy.run(&inst, &Environment::new(&inst, i)?)?, d.as_ref())?
    };
    emit(None, &out)
}

fn eval(cli: &Cli, a: &EvalArgs) -> anyhow::Result<()> {
    let a = &a.policy;
    let inst = load_instance(&a.instance, cli.support_cap)?;
    let c = constraint(a, inst.n())?;
    let (policy, d) = build_policy(cli, a, &inst, &c)?;
    let opt_wc = oracle(&inst, &c, a.cap).solve(Objective::WorstCase)?.value;
    let opt_avg = oracle(&inst, &c, a.cap).solve(Objective::Average)?.value;
    let evaluation = evaluate_policy(&inst, policy.as_ref())?;
    let beta = d.as_ref().map_or(a.beta, |d| d.beta);
    let report = RobustnessReport::new(&evaluation, &c, opt_wc, opt_avg, beta)?;
    emit(None, &with_descriptor(&report, d.as_ref())?)
}

fn check(cli: &Cli, a: &CheckArgs) -> anyhow::Result<Option<StrictFailure>> {
    let properties = if a.properties.is_empty() {
        Property::ALL.to_vec()
    } else {
        a.properties
            .iter()
            .map(|p| p.parse::<Property>())
            .collect::<Result<Vec<_>, _>>()?
    };
    let inst = load_instance(&a.instance, cli.support_cap)?;
    let mut checker = Checker::new(&inst).tolerance(cli.tol);
    if let Some(cap) = a.cap {
        checker = checker.cap(cap);
    }
    let mut failed = false;
    let mut stdout = io::stdout().lock();
    for p in properties {
        let report = checker.check(p)?;
        failed |= !report.passed();
        writeln!(stdout, "{}", serde_json::to_string(&report)?)?;
    }
    Ok((failed && cli.strict).then_some(StrictFailure))
}

fn experiment(cli: &Cli, a: &ExperimentArgs) -> anyhow::Result<()> {
    let cfg: ExperimentConfig = match &a.config {
        Some(path) => json_arg(&path.to_string_lossy())?,
        None => ExperimentConfig {
            points: a.points,
            hypotheses: a.hypotheses,
            labels: parse_labels(&a.labels)?,
            k_min: a.k_min,
            k_max: a.k_max,
            policies: a
                .policies
                .iter()
                .filter(|p| !p.is_empty())
                .map(|p| {
                    serde_json::from_value::<ExperimentPolicy>(serde_json::Value::from(p.as_str()))
                        .map_err(|_| usage(format!("unknown experiment policy '{p}'")))
                })
                .collect::<anyhow::Result<_>>()?,
            repetitions: a.repetitions,
            seed: cli.seed,
            support_cap: cli.support_cap,
        },
    };
    let rows = run_experiment(&cfg)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    emit(a.out.as_deref(), &String::from_utf8(bytes)?)
}
