mod common;

use proptest::prelude::*;

use robust_asm::applications::{build_sensor_selection, build_stochastic_coverage, counterexample};
use robust_asm::model::{
    CoverOutcome, FnUtility, Instance, ItemId, ItemSet, PartialRealization, Prior, Realization,
    State,
};
use robust_asm::policies::Rule;
use robust_asm::properties::{
    check_adaptive_monotone, check_adaptive_submodular, check_minimal_dependency,
    check_pointwise, check_prop2_implication, check_state_set_stability, check_wc_monotone,
    check_wc_submodular, Checker, Property, Status, Witness,
};
use robust_asm::Error;

use common::*;

/// Every binary realization over `n` items, uniformly weighted.
fn product_prior(n: usize) -> Prior {
    Prior::uniform(
        (0..1usize << n)
            .map(|bits| Realization::from_labels((0..n).map(|e| bits >> e & 1)))
            .collect(),
    )
    .unwrap()
}

fn fn_instance(
    prior: Prior,
    md: bool,
    f: impl Fn(ItemSet, &Realization) -> f64 + Send + Sync + 'static,
) -> Instance {
    Instance::from_model(2, prior, FnUtility::new("planted", f).with_minimal_dependency(md)).unwrap()
}

fn reachable(inst: &Instance) -> Vec<PartialRealization> {
    let mut out: Vec<PartialRealization> = inst
        .prior()
        .iter()
        .flat_map(|(phi, _)| ItemSet::full(inst.n()).subsets().map(|s| phi.restrict(s)))
        .collect();
    out.sort();
    out.dedup();
    out
}

#[test]
fn trap_is_not_worst_case_submodular() {
    let inst = trap();
    let report = check_wc_submodular(&inst).unwrap();
    assert_eq!(report.status, Status::Fail);
    let w = report.witness.unwrap();
    assert_eq!(
        w,
        Witness::Submodularity {
            rule: Rule::WorstCase,
            psi: psi(&[]),
            psi_prime: psi(&[(0, 0)]),
            item: ItemId(1),
            at_psi: 0.0,
            at_psi_prime: 1.0,
        }
    );
    assert!(w.reverify(&inst, 1e-9).unwrap());
}

#[test]
fn trap_other_properties() {
    let inst = trap();
    assert!(check_wc_monotone(&inst).unwrap().passed());
    assert!(check_pointwise(&inst).unwrap().passed());
    assert!(check_minimal_dependency(&inst).unwrap().passed());
    let stability = check_state_set_stability(&inst).unwrap();
    assert!(!stability.passed());
    let w = stability.witness.unwrap();
    assert!(matches!(w, Witness::StateSet { .. }));
    assert!(w.reverify(&inst, 1e-9).unwrap());
    let implication = check_prop2_implication(&inst).unwrap();
    assert!(implication.passed());
    assert!(implication.note.unwrap().starts_with("vacuous"));
}

#[test]
fn trap_state_set_example() {
    let inst = trap();
    assert_eq!(
        inst.possible_states(ItemId(1), &psi(&[(0, 0)])).unwrap(),
        vec![State(1)]
    );
    assert_eq!(
        inst.possible_states(ItemId(1), &psi(&[])).unwrap(),
        vec![State(0), State(1)]
    );
}

#[test]
fn active_learning_passes_everything_it_should() {
    for seed in 0..20 {
        let inst = random_al(seed, 4, 10, 2 + (seed % 2) as usize);
        for check in [
            check_wc_submodular,
            check_wc_monotone,
            check_adaptive_submodular,
            check_adaptive_monotone,
            check_minimal_dependency,
        ] {
            let r = check(&inst).unwrap();
            assert!(r.passed(), "seed {seed}: {:?}", r);
        }
    }
}

#[test]
fn modular_utility_with_independent_states() {
    let w = [[0.3, 1.0], [0.7, 0.2], [0.5, 0.5]];
    let inst = fn_instance(product_prior(3), true, move |s, phi| {
        s.iter().map(|e| w[e.0][phi.state(e).0]).sum()
    });
    for p in Property::ALL {
        let r = Checker::new(&inst).check(p).unwrap();
        assert!(r.passed(), "{p}: {:?}", r.witness);
    }
}

#[test]
fn planted_negative_marginal() {
    // Item 2 costs 1 when its state is 1.
    let inst = fn_instance(product_prior(3), true, |s, phi| {
        s.iter()
            .map(|e| if e.0 == 2 && phi.state(e) == State(1) { -1.0 } else { 1.0 })
            .sum::<f64>()
            + 3.0
    });
    let r = check_wc_monotone(&inst).unwrap();
    let Some(Witness::Monotonicity { item, value, .. }) = r.witness else {
        panic!("expected a monotonicity witness, got {r:?}");
    };
    assert_eq!(item, ItemId(2));
    assert!((value + 1.0).abs() < 1e-12);
    assert!(check_adaptive_monotone(&inst).unwrap().passed());
}

#[test]
fn planted_adaptive_violations() {
    // Supermodular: the second item is worth more than the first.
    let inst = fn_instance(product_prior(2), true, |s, _| (s.len() * s.len()) as f64);
    let r = check_adaptive_submodular(&inst).unwrap();
    assert!(!r.passed());
    assert!(r.witness.unwrap().reverify(&inst, 1e-9).unwrap());
    let inst = fn_instance(product_prior(2), true, |s, _| -(s.len() as f64));
    assert!(!check_adaptive_monotone(&inst).unwrap().passed());
    assert!(!check_pointwise(&inst).unwrap().passed());
}

#[test]
fn single_realization_submodular_table_is_adaptive_submodular() {
    let prior = Prior::new(vec![(Realization::from_labels([0, 1, 0]), 1.0)]).unwrap();
    let inst = fn_instance(prior, true, |s, _| (s.len() as f64).sqrt());
    assert!(check_adaptive_submodular(&inst).unwrap().passed());
    assert!(check_wc_submodular(&inst).unwrap().passed());
}

#[test]
fn planted_pointwise_violation() {
    let inst = fn_instance(product_prior(3), true, |s, _| (s.len() * s.len()) as f64);
    let r = check_pointwise(&inst).unwrap();
    let w = r.witness.unwrap();
    assert!(matches!(w, Witness::PointwiseSubmodularity { .. }));
    assert!(w.reverify(&inst, 1e-9).unwrap());
    let implication = check_prop2_implication(&inst).unwrap();
    assert!(implication.passed());
    assert!(implication.note.unwrap().contains("pointwise"));
}

#[test]
fn planted_minimal_dependency_violation() {
    // Reads item 2 even when it is not selected.
    let inst = fn_instance(product_prior(3), false, |s, phi| {
        s.len() as f64 + phi.state(ItemId(2)).0 as f64
    });
    let r = check_minimal_dependency(&inst).unwrap();
    let w = r.witness.unwrap();
    assert!(matches!(w, Witness::MinimalDependency { .. }));
    assert!(w.reverify(&inst, 1e-9).unwrap());
}

#[test]
fn state_set_stability_examples() {
    let inst = fn_instance(product_prior(3), true, |s, _| s.len() as f64);
    assert!(check_state_set_stability(&inst).unwrap().passed());
    let prior = Prior::uniform(vec![Realization::from_labels([0, 0, 0])]).unwrap();
    let inst = fn_instance(prior, true, |s, _| s.len() as f64);
    assert!(check_state_set_stability(&inst).unwrap().passed());
}

#[test]
fn coverage_satisfies_the_implication_non_vacuously() {
    let items = vec![
        vec![
            CoverOutcome { covers: vec![0, 1], prob: 0.5 },
            CoverOutcome { covers: vec![2], prob: 0.5 },
        ],
        vec![
            CoverOutcome { covers: vec![1, 2], prob: 0.3 },
            CoverOutcome { covers: vec![3], prob: 0.7 },
        ],
        vec![CoverOutcome { covers: vec![0, 3], prob: 1.0 }],
    ];
    let inst = build_stochastic_coverage(4, items, None, 4096).unwrap();
    let r = check_prop2_implication(&inst).unwrap();
    assert!(r.passed());
    assert!(!r.note.unwrap().starts_with("vacuous"));
    let sensors = build_sensor_selection(
        vec![vec![1.0, 0.5], vec![0.2, 0.9], vec![0.4, 0.4]],
        vec![0.2, 0.5, 0.1],
        4096,
    )
    .unwrap();
    let r = check_prop2_implication(&sensors).unwrap();
    assert!(r.passed() && !r.note.unwrap().starts_with("vacuous"));
}

#[test]
fn pair_cap_is_enforced() {
    let inst = random_al(1, 5, 12, 2);
    assert!(matches!(
        Checker::new(&inst).cap(3).wc_submodular(),
        Err(Error::SearchSpaceTooLarge { cap: 3, .. })
    ));
}

#[test]
fn sweep_covers_exactly_the_reachable_set() {
    let inst = trap();
    let checker = Checker::new(&inst);
    let swept = checker.reachable().unwrap().to_vec();
    assert_eq!(swept, reachable(&inst));
    for p in &swept {
        assert!(inst.conditional_distribution(p).is_ok());
    }
}

#[test]
fn witnesses_are_deterministic() {
    let inst = counterexample(0.3).unwrap();
    let a = check_wc_submodular(&inst).unwrap();
    for _ in 0..5 {
        assert_eq!(a, check_wc_submodular(&inst).unwrap());
    }
}

/// Brute-force worst-case submodularity over reachable pairs.
fn ref_wc_submodular(inst: &Instance) -> bool {
    let all = reachable(inst);
    for p in &all {
        for q in all.iter().filter(|q| p.is_subrealization_of(q)) {
            for e in (0..inst.n()).map(ItemId).filter(|e| !q.dom().contains(*e)) {
                if ref_wc_marginal(inst, e, p) < ref_wc_marginal(inst, e, q) - 1e-9 {
                    return false;
                }
            }
        }
    }
    true
}

fn random_instance(seed: u64) -> Instance {
    let mut r = rng(seed);
    let n = 2 + (seed % 2) as usize;
    let support: Vec<Realization> = (0..1usize << n)
        .filter(|_| rand::Rng::gen_bool(&mut r, 0.6))
        .map(|bits| Realization::from_labels((0..n).map(|e| bits >> e & 1)))
        .collect();
    let support = if support.is_empty() {
        vec![Realization::from_labels(vec![0; n])]
    } else {
        support
    };
    random_table_instance(&mut r, n, support, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn checker_agrees_with_brute_force(seed in any::<u64>()) {
        let inst = random_instance(seed);
        prop_assert_eq!(check_wc_submodular(&inst).unwrap().passed(), ref_wc_submodular(&inst));
    }

    #[test]
    fn failures_reverify(seed in any::<u64>()) {
        let inst = random_instance(seed);
        for p in Property::ALL {
            let r = Checker::new(&inst).check(p).unwrap();
            if let Some(w) = r.witness {
                if !matches!(w, Witness::Implication { .. }) {
                    prop_assert!(w.reverify(&inst, 1e-9).unwrap(), "{} {:?}", p, w);
                }
            }
        }
    }

    #[test]
    fn wc_monotone_implies_adaptive_monotone(seed in any::<u64>()) {
        let inst = random_instance(seed);
        if check_wc_monotone(&inst).unwrap().passed() {
            prop_assert!(check_adaptive_monotone(&inst).unwrap().passed());
        }
    }
}
