//! Reference implementations written straight from the definitions, used
//! as independent oracles against the library.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robust_asm::applications::{
    build_active_learning, counterexample, random_hypothesis_space, LabelMode,
    DEFAULT_SUPPORT_CAP,
};
use robust_asm::constraints::ConstraintSystem;
use robust_asm::model::{
    Instance, ItemId, ItemSet, PartialRealization, Prior, Realization, RealizationRef, State,
    TableUtility,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn psi(pairs: &[(usize, usize)]) -> PartialRealization {
    PartialRealization::from_pairs(pairs.iter().map(|&(e, o)| (ItemId(e), State(o)))).unwrap()
}

pub fn set(items: &[usize]) -> ItemSet {
    items.iter().map(|&i| ItemId(i)).collect()
}

pub fn trap() -> Instance {
    counterexample(0.1).unwrap()
}

/// Random binary-label active-learning instance.
pub fn random_al(seed: u64, n: usize, max_h: usize, labels: usize) -> Instance {
    let mut r = rng(seed);
    let h = r.gen_range(2..=max_h);
    let hs = random_hypothesis_space(&mut r, n, h, LabelMode::Uniform(labels)).unwrap();
    build_active_learning(&hs, DEFAULT_SUPPORT_CAP).unwrap()
}

/// `f(S, φ_i)` straight from the utility, bypassing the memo.
pub fn raw(inst: &Instance, s: ItemSet, i: usize) -> f64 {
    inst.utility().value(
        s,
        RealizationRef {
            index: i,
            phi: inst.prior().realization(i),
        },
    )
}

fn consistent_members(inst: &Instance, psi: &PartialRealization) -> Vec<usize> {
    (0..inst.prior().len())
        .filter(|&i| {
            psi.iter()
                .all(|(e, o)| inst.prior().realization(i).state(e) == o)
        })
        .collect()
}

/// `E[f(S, Φ) | Φ ~ ψ]`.
pub fn ref_f_on_partial(inst: &Instance, s: ItemSet, psi: &PartialRealization) -> f64 {
    let members = consistent_members(inst, psi);
    let mass: f64 = members.iter().map(|&i| inst.prior().prob(i)).sum();
    members
        .iter()
        .map(|&i| inst.prior().prob(i) * raw(inst, s, i))
        .sum::<f64>()
        / mass
}

pub fn ref_possible_states(inst: &Instance, e: ItemId, psi: &PartialRealization) -> Vec<State> {
    let mut states: Vec<State> = consistent_members(inst, psi)
        .into_iter()
        .map(|i| inst.prior().realization(i).state(e))
        .collect();
    states.sort();
    states.dedup();
    states
}

pub fn ref_wc_marginal(inst: &Instance, e: ItemId, psi: &PartialRealization) -> f64 {
    let dom = psi.dom();
    let base = ref_f_on_partial(inst, dom, psi);
    ref_possible_states(inst, e, psi)
        .into_iter()
        .map(|o| ref_f_on_partial(inst, dom.with(e), &psi.with(e, o).unwrap()) - base)
        .fold(f64::INFINITY, f64::min)
}

pub fn ref_avg_marginal(inst: &Instance, e: ItemId, psi: &PartialRealization) -> f64 {
    let dom = psi.dom();
    let members = consistent_members(inst, psi);
    let mass: f64 = members.iter().map(|&i| inst.prior().prob(i)).sum();
    members
        .iter()
        .map(|&i| inst.prior().prob(i) * (raw(inst, dom.with(e), i) - raw(inst, dom, i)))
        .sum::<f64>()
        / mass
}

/// A deterministic policy tree for the enumeration oracle.
#[derive(Clone, Debug)]
pub enum Tree {
    Stop,
    Select(ItemId, Vec<Tree>),
}

/// Every tree of depth at most `depth` over `n` items with `states` states
/// per item, never re-selecting an item on a path.
pub fn all_trees(n: usize, states: usize, depth: usize, used: ItemSet) -> Vec<Tree> {
    let mut out = vec![Tree::Stop];
    if depth == 0 {
        return out;
    }
    for e in (0..n).map(ItemId).filter(|e| !used.contains(*e)) {
        let subtrees = all_trees(n, states, depth - 1, used.with(e));
        // Cartesian product over the children of each state.
        let mut combos: Vec<Vec<Tree>> = vec![Vec::new()];
        for _ in 0..states {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    subtrees.iter().map(move |t| {
                        let mut next = c.clone();
                        next.push(t.clone());
                        next
                    })
                })
                .collect();
        }
        out.extend(combos.into_iter().map(|c| Tree::Select(e, c)));
    }
    out
}

pub fn tree_selection(tree: &Tree, phi: &Realization) -> ItemSet {
    let mut s = ItemSet::EMPTY;
    let mut node = tree;
    while let Tree::Select(e, children) = node {
        s.insert(*e);
        node = &children[phi.state(*e).0];
    }
    s
}

/// `(max f_wc, max f_avg)` over every tree of depth `≤ k`, by brute force.
pub fn enumeration_optimum(inst: &Instance, k: usize) -> (f64, f64) {
    let trees = all_trees(inst.n(), inst.num_states(), k, ItemSet::EMPTY);
    let mut best = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for t in &trees {
        let mut wc = f64::INFINITY;
        let mut avg = 0.0;
        for (i, (phi, p)) in inst.prior().iter().enumerate() {
            let v = raw(inst, tree_selection(t, phi), i);
            wc = wc.min(v);
            avg += p * v;
        }
        best.0 = best.0.max(wc);
        best.1 = best.1.max(avg);
    }
    best
}

/// Table utility with random values in `[0, 1)` over the given support.
pub fn random_table_instance<R: Rng>(
    r: &mut R,
    n: usize,
    support: Vec<Realization>,
    num_states: usize,
) -> Instance {
    let weights: Vec<f64> = support.iter().map(|_| r.gen_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let prior = Prior::new(
        support
            .iter()
            .cloned()
            .zip(weights.iter().map(|w| w / total))
            .collect(),
    )
    .unwrap();
    let rows: Vec<(ItemSet, Vec<f64>)> = ItemSet::full(n)
        .subsets()
        .map(|s| (s, support.iter().map(|_| r.gen::<f64>()).collect()))
        .collect();
    let table = TableUtility::new(n, support.len(), rows, false).unwrap();
    Instance::from_model(num_states, prior, table).unwrap()
}

/// Random partition of `0..n` into `blocks` non-empty blocks with limits
/// in `1..=min(|block|, max_limit)`.
pub fn random_partition<R: Rng>(
    r: &mut R,
    n: usize,
    blocks: usize,
    min_limit: usize,
    max_limit: usize,
) -> ConstraintSystem {
    loop {
        let assign: Vec<usize> = (0..n).map(|_| r.gen_range(0..blocks)).collect();
        let sets: Vec<ItemSet> = (0..blocks)
            .map(|b| (0..n).filter(|&e| assign[e] == b).map(ItemId).collect())
            .collect();
        if sets.iter().any(|s: &ItemSet| s.len() < min_limit.max(1)) {
            continue;
        }
        let limits = sets
            .iter()
            .map(|s| r.gen_range(min_limit..=s.len().min(max_limit).max(min_limit)))
            .collect();
        return ConstraintSystem::partition(sets, limits).unwrap();
    }
}

/// `max_{S ∈ I} f(S, φ_0)` by subset enumeration.
pub fn best_independent_set(inst: &Instance, c: &ConstraintSystem) -> f64 {
    ItemSet::full(inst.n())
        .subsets()
        .filter(|s| c.is_independent(*s))
        .map(|s| raw(inst, s, 0))
        .fold(f64::NEG_INFINITY, f64::max)
}
