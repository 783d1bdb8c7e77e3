mod common;

use std::collections::BTreeSet;

use colearn::distinguish::distinguishing_test;
use colearn::format::{export_dot, export_system, parse_system};
use colearn::logic::{
    eval_test, holds, subformula_closure, suffix_closure, theory_row, Test, TestSuite, TruthValue,
};
use colearn::reachability::{
    disjoint_union, gamma, is_subcoalgebra, isomorphic, logical_partition, logical_quotient,
    reachable_part, reachable_part_with_steps, restrict, StateSet,
};
use colearn::system::{Kind, StateId};
use colearn::{learn, EquivalenceAnswer, LearnConfig, Teacher};
use common::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const KINDS: [Kind; 3] = [Kind::Dfa, Kind::Mealy, Kind::Lts];

fn kind() -> impl Strategy<Value = Kind> {
    prop::sample::select(KINDS.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn suffix_closure_laws(
        words in prop::collection::vec(prop::collection::vec(0usize..3, 0..6), 0..5),
        extra in prop::collection::vec(0usize..3, 0..6),
        mealy in any::<bool>(),
    ) {
        let kind = if mealy { Kind::Mealy } else { Kind::Dfa };
        let small = suffix_closure(kind, 3, words.clone()).unwrap();
        let again = suffix_closure(kind, 3, small.iter().map(|t| match t {
            Test::Word(w) => w.clone(),
            _ => unreachable!(),
        })).unwrap();
        prop_assert_eq!(&again, &small);
        prop_assert!(small.is_closed());
        for w in &words {
            if !(mealy && w.is_empty()) {
                prop_assert!(small.contains(&Test::Word(w.clone())));
            }
        }
        let mut more = words.clone();
        more.push(extra);
        let big = suffix_closure(kind, 3, more).unwrap();
        prop_assert!(small.is_subset(&big));
        let bound: usize = words.iter().map(|w| w.len() + 1).sum();
        prop_assert!(small.len() <= bound);
    }

    #[test]
    fn subformula_closure_laws(seed in any::<u64>(), count in 0usize..4) {
        let mut rng = StdRng::seed_from_u64(seed);
        let formulas: Vec<_> = (0..count)
            .map(|_| { let n = rng.gen_range(1..8); random_formula(&mut rng, 2, n) })
            .collect();
        let suite = subformula_closure(2, formulas.clone()).unwrap();
        prop_assert!(suite.is_closed());
        let again = subformula_closure(2, suite.iter().map(|t| match t {
            Test::Formula(f) => f.clone(),
            _ => unreachable!(),
        })).unwrap();
        prop_assert_eq!(&again, &suite);
        let bound: usize = formulas.iter().map(|f| f.size()).sum();
        prop_assert!(suite.len() <= bound);
        let extra = random_formula(&mut rng, 2, 5);
        let mut more = formulas.clone();
        more.push(extra);
        prop_assert!(suite.is_subset(&subformula_closure(2, more).unwrap()));
    }

    #[test]
    fn successors_stay_inside(seed in any::<u64>(), kind in kind()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = random_system(&mut rng, kind, 8);
        for x in sys.state_ids() {
            let succ = sys.successors(x).unwrap();
            prop_assert!(succ.iter().all(|&y| sys.contains(y)));
            prop_assert!(succ.windows(2).all(|w| w[0] < w[1]));
            if kind == Kind::Lts {
                let union: BTreeSet<StateId> = (0..sys.alphabet().len())
                    .flat_map(|a| sys.targets(x, a).to_vec())
                    .collect();
                prop_assert_eq!(succ.iter().copied().collect::<BTreeSet<_>>(), union);
            } else {
                prop_assert!(succ.len() <= sys.alphabet().len());
            }
        }
    }

    #[test]
    fn retarget_is_functorial(seed in any::<u64>(), kind in kind()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = random_system(&mut rng, kind, 8);
        let n = sys.num_states();
        let first: Vec<StateId> = (0..n).map(|_| StateId(rng.gen_range(0..n))).collect();
        let second: Vec<StateId> = (0..n).map(|_| StateId(rng.gen_range(0..n))).collect();
        for x in sys.state_ids() {
            let composed = sys.retarget(x, |y| Some(second[first[y.0].0])).unwrap();
            let stepwise = sys.retarget(x, |y| Some(first[y.0])).unwrap().map(|y| second[y.0]);
            prop_assert_eq!(composed, stepwise);
            prop_assert_eq!(sys.retarget(x, Some).unwrap(), sys.step(x).unwrap());
        }
    }

    #[test]
    fn bigger_suites_refine_rows(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = random_lts(&mut rng, 6, 2, 3);
        let small_formulas: Vec<_> = (0..2).map(|_| random_formula(&mut rng, sys.alphabet().len(), 4)).collect();
        let small = subformula_closure(sys.alphabet().len(), small_formulas.clone()).unwrap();
        let mut all = small_formulas;
        all.push(random_formula(&mut rng, sys.alphabet().len(), 6));
        let big = subformula_closure(sys.alphabet().len(), all).unwrap();
        for x in sys.state_ids() {
            for y in sys.state_ids() {
                if theory_row(&sys, x, &big).unwrap() == theory_row(&sys, y, &big).unwrap() {
                    prop_assert_eq!(theory_row(&sys, x, &small).unwrap(), theory_row(&sys, y, &small).unwrap());
                }
            }
        }
    }

    #[test]
    fn counterexamples_are_sound(seed in any::<u64>(), kind in kind()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let target = random_system(&mut rng, kind, 6);
        // An unrelated machine over the same alphabet.
        let other = loop {
            let candidate = random_system(&mut rng, kind, 6);
            if candidate.alphabet() == target.alphabet() && candidate.outputs() == target.outputs() {
                break candidate;
            }
        };
        let mut teacher = Teacher::new(target.clone());
        match teacher.equivalence_query(&other).unwrap() {
            EquivalenceAnswer::Correct => {
                for _ in 0..50 {
                    let t = random_test(&mut rng, &target);
                    prop_assert!(!teacher.verify_counterexample(&other, &t).unwrap());
                }
            }
            EquivalenceAnswer::Counterexample(t) => {
                prop_assert!(teacher.verify_counterexample(&other, &t).unwrap());
            }
        }
        prop_assert_eq!(teacher.equivalence_query(&target).unwrap(), EquivalenceAnswer::Correct);
    }

    #[test]
    fn deterministic_counterexamples_are_shortlex_least(seed in any::<u64>(), mealy in any::<bool>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let kind = if mealy { Kind::Mealy } else { Kind::Dfa };
        let target = random_system(&mut rng, kind, 5);
        let other = loop {
            let c = random_system(&mut rng, kind, 5);
            if c.alphabet() == target.alphabet() && c.outputs() == target.outputs() {
                break c;
            }
        };
        let found = distinguishing_test(&target, &other).unwrap();
        let differs = |w: &[usize]| {
            if mealy {
                !w.is_empty()
                    && brute_last_output(&target, target.initial(), w)
                        != brute_last_output(&other, other.initial(), w)
            } else {
                brute_accepts(&target, target.initial(), w) != brute_accepts(&other, other.initial(), w)
            }
        };
        match found {
            Some(Test::Word(w)) => {
                prop_assert!(differs(&w));
                let first = all_words(target.alphabet().len(), w.len()).into_iter().find(|v| differs(v));
                prop_assert_eq!(first, Some(w));
            }
            Some(other) => prop_assert!(false, "unexpected test {:?}", other),
            None => {
                for _ in 0..500 {
                    let w = random_word(&mut rng, target.alphabet().len(), 12);
                    prop_assert!(!differs(&w));
                }
            }
        }
    }

    #[test]
    fn lts_correct_iff_no_formula_separates(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let left = random_lts(&mut rng, 4, 2, 2);
        let right = loop {
            let c = random_lts(&mut rng, 4, 2, 2);
            if c.alphabet() == left.alphabet() {
                break c;
            }
        };
        let union = disjoint_union(&left, &right).unwrap();
        let shifted = right.initial().0 + left.num_states();
        let separable = definable_sets(&union)
            .iter()
            .any(|s| s.contains(&left.initial().0) != s.contains(&shifted));
        let mut teacher = Teacher::new(left.clone());
        let answer = teacher.equivalence_query(&right).unwrap();
        prop_assert_eq!(answer == EquivalenceAnswer::Correct, !separable);
        let partition = logical_partition(&union);
        prop_assert_eq!(partition.same_block(left.initial(), StateId(shifted)), !separable);
    }

    #[test]
    fn gamma_is_monotone(seed in any::<u64>(), kind in kind()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = random_system(&mut rng, kind, 8);
        let small: StateSet = sys.state_ids().filter(|_| rng.gen_bool(0.4)).collect();
        let mut big = small.clone();
        big.extend(sys.state_ids().filter(|_| rng.gen_bool(0.4)));
        prop_assert!(gamma(&sys, &small).unwrap().is_subset(&gamma(&sys, &big).unwrap()));
    }

    #[test]
    fn reachable_part_is_least(seed in any::<u64>(), kind in kind()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = random_system(&mut rng, kind, 6);
        let (reach, steps) = reachable_part_with_steps(&sys);
        prop_assert!(steps <= sys.num_states() + 1);
        prop_assert_eq!(&reach, &brute_reachable(&sys));
        prop_assert!(reach.contains(&sys.initial()));
        prop_assert!(is_subcoalgebra(&sys, &reach).unwrap());
        let n = sys.num_states();
        for mask in 0u32..(1 << n) {
            let s: StateSet = (0..n).filter(|i| mask & (1 << i) != 0).map(StateId).collect();
            if s.contains(&sys.initial()) && is_subcoalgebra(&sys, &s).unwrap() {
                prop_assert!(reach.is_subset(&s));
            }
        }
    }

    #[test]
    fn quotient_is_idempotent(seed in any::<u64>(), kind in kind()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = random_system(&mut rng, kind, 8);
        let (_, once) = logical_quotient(&sys);
        let (partition, twice) = logical_quotient(&once);
        prop_assert_eq!(partition.num_blocks(), once.num_states());
        prop_assert!(isomorphic(&once, &twice));
    }

    #[test]
    fn blocks_match_exhaustive_separation(seed in any::<u64>(), kind in kind()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = random_system(&mut rng, kind, 5);
        let partition = logical_partition(&sys);
        let n = sys.num_states();
        let separated = |x: StateId, y: StateId| -> bool {
            match kind {
                Kind::Dfa => all_words(sys.alphabet().len(), n)
                    .iter()
                    .any(|w| brute_accepts(&sys, x, w) != brute_accepts(&sys, y, w)),
                Kind::Mealy => all_words(sys.alphabet().len(), n + 1)
                    .iter()
                    .filter(|w| !w.is_empty())
                    .any(|w| brute_last_output(&sys, x, w) != brute_last_output(&sys, y, w)),
                Kind::Lts => definable_sets(&sys)
                    .iter()
                    .any(|s| s.contains(&x.0) != s.contains(&y.0)),
            }
        };
        for x in sys.state_ids() {
            for y in sys.state_ids() {
                prop_assert_eq!(partition.same_block(x, y), !separated(x, y));
            }
        }
    }

    #[test]
    fn sampled_tests_never_split_a_block(seed in any::<u64>(), kind in kind()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = random_system(&mut rng, kind, 8);
        let partition = logical_partition(&sys);
        for _ in 0..100 {
            let t = random_test(&mut rng, &sys);
            for x in sys.state_ids() {
                for y in sys.state_ids() {
                    if partition.same_block(x, y) {
                        prop_assert_eq!(eval_test(&sys, x, &t).unwrap(), eval_test(&sys, y, &t).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn files_round_trip(seed in any::<u64>(), kind in kind()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = random_system(&mut rng, kind, 8);
        let text = export_system(&sys);
        let back = parse_system(&text).unwrap();
        prop_assert!(isomorphic(&back, &sys));
        prop_assert_eq!(&back, &sys);
        prop_assert_eq!(export_dot(&sys), export_dot(&back));
    }

    #[test]
    fn learned_system_is_the_reachable_quotient(seed in any::<u64>(), kind in kind()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let sys = random_system(&mut rng, kind, 6);
        let mut teacher = Teacher::new(sys.clone());
        let config = LearnConfig { check_invariants: true, ..LearnConfig::default() };
        let out = learn(&mut teacher, &config).unwrap();
        let (_, quotient) = logical_quotient(&restrict(&sys, &reachable_part(&sys)).unwrap());
        prop_assert!(isomorphic(&out.conjecture.system, &quotient));
        let mut check = Teacher::new(sys);
        prop_assert_eq!(check.equivalence_query(&out.conjecture.system).unwrap(), EquivalenceAnswer::Correct);
    }
}

fn random_test(rng: &mut StdRng, sys: &colearn::PointedSystem) -> Test {
    let k = sys.alphabet().len();
    match sys.kind() {
        Kind::Dfa => Test::Word(random_word(rng, k, 8)),
        Kind::Mealy => {
            let mut w = random_word(rng, k, 7);
            w.push(rng.gen_range(0..k));
            Test::Word(w)
        }
        Kind::Lts => {
            let size = rng.gen_range(1..=7);
            Test::Formula(random_formula(rng, k, size))
        }
    }
}

#[test]
fn dfa_step_law_on_random_words() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..200 {
        let sys = random_dfa(&mut rng, 8, 3);
        let x = StateId(rng.gen_range(0..sys.num_states()));
        let a = rng.gen_range(0..sys.alphabet().len());
        let w = random_word(&mut rng, sys.alphabet().len(), 6);
        let mut aw = vec![a];
        aw.extend(&w);
        let next = sys.next(x, a).unwrap();
        assert_eq!(
            eval_test(&sys, x, &Test::Word(aw)).unwrap(),
            eval_test(&sys, next, &Test::Word(w)).unwrap()
        );
    }
}

#[test]
fn modal_connectives_are_boolean() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let sys = random_lts(&mut rng, 6, 2, 3);
        let f = random_formula(&mut rng, sys.alphabet().len(), 4);
        let g = random_formula(&mut rng, sys.alphabet().len(), 3);
        for x in sys.state_ids() {
            let (fx, gx) = (holds(&sys, x, &f), holds(&sys, x, &g));
            use colearn::Formula;
            assert_eq!(holds(&sys, x, &Formula::not(f.clone())), !fx);
            assert_eq!(holds(&sys, x, &Formula::or(f.clone(), g.clone())), fx || gx);
            assert_eq!(holds(&sys, x, &Formula::and(f.clone(), g.clone())), fx && gx);
            assert_eq!(brute_extension(&sys, &f).contains(&x.0), fx);
        }
    }
}

#[test]
fn empty_suite_gives_empty_rows() {
    let sys = mod3();
    for x in sys.state_ids() {
        assert!(theory_row(&sys, x, &TestSuite::empty(Kind::Dfa)).unwrap().0.is_empty());
    }
    let lts = golden_lts();
    let t = Test::parse("T", Kind::Lts, lts.alphabet()).unwrap();
    assert_eq!(eval_test(&lts, lts.initial(), &t).unwrap(), TruthValue::Bool(true));
}
