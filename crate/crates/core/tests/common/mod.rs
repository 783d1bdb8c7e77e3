//! Fixtures, random system generators and brute-force oracles shared by the
//! integration tests. Oracles here deliberately avoid the crate's own
//! evaluation and refinement code paths.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use colearn::format::parse_system;
use colearn::logic::{Formula, Word};
use colearn::system::{Dynamics, Kind, PointedSystem, StateId, Symbols};
use rand::rngs::StdRng;
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> PointedSystem {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture exists");
    parse_system(&text).expect("fixture parses")
}

pub fn mod3() -> PointedSystem {
    fixture("mod3.json")
}

pub fn golden_lts() -> PointedSystem {
    fixture("paper_lts.json")
}

pub fn id(sys: &PointedSystem, name: &str) -> StateId {
    sys.state(name).expect("known state")
}

pub fn names(sys: &PointedSystem, states: impl IntoIterator<Item = StateId>) -> Vec<String> {
    states.into_iter().map(|x| sys.name(x).to_string()).collect()
}

fn letters(k: usize) -> Symbols {
    Symbols::new((0..k).map(|i| ((b'a' + i as u8) as char).to_string())).unwrap()
}

fn state_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("t{i}")).collect()
}

pub fn random_dfa(rng: &mut StdRng, max_states: usize, max_letters: usize) -> PointedSystem {
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_letters);
    let accepting = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let next = (0..n)
        .map(|_| (0..k).map(|_| StateId(rng.gen_range(0..n))).collect())
        .collect();
    PointedSystem::new(
        letters(k),
        None,
        state_names(n),
        Dynamics::Dfa { accepting, next },
        StateId(rng.gen_range(0..n)),
    )
    .unwrap()
}

pub fn random_mealy(
    rng: &mut StdRng,
    max_states: usize,
    max_letters: usize,
    max_outputs: usize,
) -> PointedSystem {
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_letters);
    let o = rng.gen_range(1..=max_outputs);
    let step = (0..n)
        .map(|_| {
            (0..k)
                .map(|_| (rng.gen_range(0..o), StateId(rng.gen_range(0..n))))
                .collect()
        })
        .collect();
    let outputs = Symbols::new((0..o).map(|i| format!("o{i}"))).unwrap();
    PointedSystem::new(
        letters(k),
        Some(outputs),
        state_names(n),
        Dynamics::Mealy { step },
        StateId(rng.gen_range(0..n)),
    )
    .unwrap()
}

pub fn random_lts(
    rng: &mut StdRng,
    max_states: usize,
    max_letters: usize,
    max_branching: usize,
) -> PointedSystem {
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_letters);
    let succ = (0..n)
        .map(|_| {
            (0..k)
                .map(|_| {
                    let b = rng.gen_range(0..=max_branching);
                    (0..b).map(|_| StateId(rng.gen_range(0..n))).collect()
                })
                .collect()
        })
        .collect();
    PointedSystem::new(
        letters(k),
        None,
        state_names(n),
        Dynamics::Lts { succ },
        StateId(rng.gen_range(0..n)),
    )
    .unwrap()
}

pub fn random_system(rng: &mut StdRng, kind: Kind, max_states: usize) -> PointedSystem {
    match kind {
        Kind::Dfa => random_dfa(rng, max_states, 3),
        Kind::Mealy => random_mealy(rng, max_states, 3, 3),
        Kind::Lts => random_lts(rng, max_states, 2, 3),
    }
}

pub fn random_word(rng: &mut StdRng, letters: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(0..letters)).collect()
}

/// A random formula with exactly `size` nodes.
pub fn random_formula(rng: &mut StdRng, letters: usize, size: usize) -> Formula {
    match size {
        0 | 1 => {
            if rng.gen_bool(0.5) {
                Formula::Top
            } else {
                Formula::Bottom
            }
        }
        2 => {
            let inner = random_formula(rng, letters, 1);
            if rng.gen_bool(0.5) {
                Formula::not(inner)
            } else {
                Formula::diamond(rng.gen_range(0..letters), inner)
            }
        }
        _ => match rng.gen_range(0..4) {
            0 => Formula::not(random_formula(rng, letters, size - 1)),
            1 => Formula::diamond(rng.gen_range(0..letters), random_formula(rng, letters, size - 1)),
            op => {
                let left = rng.gen_range(1..=size - 2);
                let l = random_formula(rng, letters, left);
                let r = random_formula(rng, letters, size - 1 - left);
                if op == 2 {
                    Formula::or(l, r)
                } else {
                    Formula::and(l, r)
                }
            }
        },
    }
}

/// Set semantics: the states satisfying `f`, computed bottom-up.
pub fn brute_extension(sys: &PointedSystem, f: &Formula) -> BTreeSet<usize> {
    let all: BTreeSet<usize> = (0..sys.num_states()).collect();
    match f {
        Formula::Top => all,
        Formula::Bottom => BTreeSet::new(),
        Formula::Not(g) => all.difference(&brute_extension(sys, g)).copied().collect(),
        Formula::Or(l, r) => brute_extension(sys, l)
            .union(&brute_extension(sys, r))
            .copied()
            .collect(),
        Formula::And(l, r) => brute_extension(sys, l)
            .intersection(&brute_extension(sys, r))
            .copied()
            .collect(),
        Formula::Diamond(a, g) => {
            let inner = brute_extension(sys, g);
            let Dynamics::Lts { succ } = sys.dynamics() else {
                panic!("lts expected")
            };
            (0..sys.num_states())
                .filter(|&x| succ[x][*a].iter().any(|y| inner.contains(&y.0)))
                .collect()
        }
    }
}

/// Runs a word on a DFA directly from the transition table.
pub fn brute_accepts(sys: &PointedSystem, x: StateId, word: &[usize]) -> bool {
    let Dynamics::Dfa { accepting, next } = sys.dynamics() else {
        panic!("dfa expected")
    };
    let mut state = x.0;
    for &a in word {
        state = next[state][a].0;
    }
    accepting[state]
}

/// Last output of a word on a Mealy machine, straight from the table.
pub fn brute_last_output(sys: &PointedSystem, x: StateId, word: &[usize]) -> usize {
    let Dynamics::Mealy { step } = sys.dynamics() else {
        panic!("mealy expected")
    };
    let mut state = x.0;
    let mut out = usize::MAX;
    for &a in word {
        let (o, y) = step[state][a];
        out = o;
        state = y.0;
    }
    out
}

/// Depth-first reachability from the initial state.
pub fn brute_reachable(sys: &PointedSystem) -> BTreeSet<StateId> {
    let mut seen = BTreeSet::from([sys.initial()]);
    let mut stack = vec![sys.initial()];
    while let Some(x) = stack.pop() {
        for a in 0..sys.alphabet().len() {
            for &y in sys.targets(x, a) {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    seen
}

/// All words over `letters` symbols up to length `max_len`, in shortlex order.
pub fn all_words(letters: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in 0..letters {
                let mut v: Word = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Every state set definable by a modal formula: the closure of {all} under
/// complement, union and each diamond. Two LTS states are separated by some
/// formula iff some definable set contains exactly one of them.
pub fn definable_sets(sys: &PointedSystem) -> HashSet<BTreeSet<usize>> {
    let n = sys.num_states();
    let Dynamics::Lts { succ } = sys.dynamics() else {
        panic!("lts expected")
    };
    let all: BTreeSet<usize> = (0..n).collect();
    let mut sets: HashSet<BTreeSet<usize>> = HashSet::from([all.clone(), BTreeSet::new()]);
    loop {
        let current: Vec<BTreeSet<usize>> = sets.iter().cloned().collect();
        let mut fresh = Vec::new();
        for s in &current {
            fresh.push(all.difference(s).copied().collect());
            for a in 0..sys.alphabet().len() {
                fresh.push(
                    (0..n)
                        .filter(|&x| succ[x][a].iter().any(|y| s.contains(&y.0)))
                        .collect(),
                );
            }
            for t in &current {
                fresh.push(s.union(t).copied().collect());
            }
        }
        let before = sets.len();
        sets.extend(fresh);
        if sets.len() == before {
            return sets;
        }
    }
}
