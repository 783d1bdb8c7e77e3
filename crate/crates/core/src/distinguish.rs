//! Counterexample synthesis between two pointed systems of the same kind.
//!
//! Deterministic kinds get the shortlex-least shortest separating word from
//! a breadth-first search of the synchronous product. LTSs get a modal
//! formula read off the refinement levels of the disjoint union, then shrunk
//! while it still separates the two roots.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::logic::{holds, Formula, Test, Word};
use crate::reachability::{disjoint_union, refinement_levels, Partition};
use crate::system::{Kind, PointedSystem, StateId, SystemError};

/// A test on which the initial states of `left` and `right` disagree, or
/// `None` when they are logically equivalent.
pub fn distinguishing_test(
    left: &PointedSystem,
    right: &PointedSystem,
) -> Result<Option<Test>, SystemError> {
    if left.kind() != right.kind() {
        return Err(SystemError::KindMismatch(left.kind(), right.kind()));
    }
    if left.alphabet() != right.alphabet() || left.outputs() != right.outputs() {
        return Err(SystemError::Shape("alphabets differ".into()));
    }
    Ok(match left.kind() {
        Kind::Dfa | Kind::Mealy => shortest_distinguishing_word(left, right).map(Test::Word),
        Kind::Lts => distinguishing_formula(left, right)?.map(Test::Formula),
    })
}

/// Breadth-first search over pairs `(x, y)`, letters in alphabet order, so
/// the first disagreement found is reached by the shortlex-least word.
pub fn shortest_distinguishing_word(left: &PointedSystem, right: &PointedSystem) -> Option<Word> {
    let letters = left.alphabet().len();
    let start = (left.initial(), right.initial());
    let mut parent: HashMap<(StateId, StateId), ((StateId, StateId), usize)> = HashMap::new();
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let access = |mut pair: (StateId, StateId), parent: &HashMap<_, _>| {
        let mut word = Vec::new();
        while let Some(&(prev, a)) = parent.get(&pair) {
            word.push(a);
            pair = prev;
        }
        word.reverse();
        word
    };
    while let Some(pair @ (x, y)) = queue.pop_front() {
        match left.kind() {
            Kind::Dfa => {
                if left.is_accepting(x) != right.is_accepting(y) {
                    return Some(access(pair, &parent));
                }
            }
            Kind::Mealy => {
                if let Some(a) = (0..letters).find(|&a| left.output(x, a) != right.output(y, a)) {
                    let mut word = access(pair, &parent);
                    word.push(a);
                    return Some(word);
                }
            }
            Kind::Lts => return None,
        }
        for a in 0..letters {
            let next = (
                left.next(x, a).expect("deterministic"),
                right.next(y, a).expect("deterministic"),
            );
            if seen.insert(next) {
                parent.insert(next, (pair, a));
                queue.push_back(next);
            }
        }
    }
    None
}

/// A modal formula whose truth value differs at the two roots, or `None` if
/// they are bisimilar.
pub fn distinguishing_formula(
    left: &PointedSystem,
    right: &PointedSystem,
) -> Result<Option<Formula>, SystemError> {
    let union = disjoint_union(left, right)?;
    let p = left.initial();
    let q = StateId(right.initial().0 + left.num_states());
    let mut synth = Synthesizer {
        sys: &union,
        levels: refinement_levels(&union),
        memo: HashMap::new(),
    };
    if synth.separation_level(p, q).is_none() {
        return Ok(None);
    }
    let raw = synth.separate(p, q);
    Ok(Some(shrink(&union, p, q, raw)))
}

struct Synthesizer<'a> {
    sys: &'a PointedSystem,
    levels: Vec<Partition>,
    memo: HashMap<(StateId, StateId), Formula>,
}

impl Synthesizer<'_> {
    fn separation_level(&self, p: StateId, q: StateId) -> Option<usize> {
        self.levels.iter().position(|level| !level.same_block(p, q))
    }

    /// A formula true at `p` and false at `q`, which must be separated at
    /// some level.
    fn separate(&mut self, p: StateId, q: StateId) -> Formula {
        if let Some(f) = self.memo.get(&(p, q)) {
            return f.clone();
        }
        let level = self
            .separation_level(p, q)
            .expect("states are not bisimilar");
        // Level 0 carries no observations for LTSs, so separation happens at a
        // level >= 1 where some letter's successor blocks differ.
        let prev = level - 1;
        let sys = self.sys;
        let mut best: Option<Formula> = None;
        for a in 0..sys.alphabet().len() {
            let ps = sys.targets(p, a).to_vec();
            let qs = sys.targets(q, a).to_vec();
            for &p1 in &ps {
                if qs.iter().all(|&q1| !self.levels[prev].same_block(p1, q1)) {
                    let inner = self.conjoin(p1, &qs);
                    consider(&mut best, Formula::diamond(a, inner));
                }
            }
            for &q1 in &qs {
                if ps.iter().all(|&p1| !self.levels[prev].same_block(q1, p1)) {
                    let inner = self.conjoin(q1, &ps);
                    consider(&mut best, Formula::not(Formula::diamond(a, inner)));
                }
            }
        }
        let f = best.expect("a separating letter exists at the separation level");
        self.memo.insert((p, q), f.clone());
        f
    }

    /// Conjunction of formulas true at `x` and false at each of `others`.
    fn conjoin(&mut self, x: StateId, others: &[StateId]) -> Formula {
        let mut parts: Vec<Formula> = Vec::new();
        for &y in others {
            let f = self.separate(x, y);
            if !parts.contains(&f) {
                parts.push(f);
            }
        }
        parts.sort();
        Formula::conjunction(parts)
    }
}

fn consider(best: &mut Option<Formula>, candidate: Formula) {
    if best.as_ref().is_none_or(|b| candidate < *b) {
        *best = Some(candidate);
    }
}

/// Greedily replaces subformulas by smaller ones (constants, immediate
/// subformulas) as long as the result still separates `p` and `q`.
fn shrink(sys: &PointedSystem, p: StateId, q: StateId, mut f: Formula) -> Formula {
    let separates = |g: &Formula| holds(sys, p, g) != holds(sys, q, g);
    debug_assert!(separates(&f));
    'outer: loop {
        let mut candidates = rewrites(&f);
        candidates.sort();
        for g in candidates {
            if g.size() < f.size() && separates(&g) {
                f = g;
                continue 'outer;
            }
        }
        return f;
    }
}

/// Every formula obtained from `f` by replacing one node with a constant or
/// with one of its immediate subformulas.
fn rewrites(f: &Formula) -> Vec<Formula> {
    let mut out = Vec::new();
    if !matches!(f, Formula::Top | Formula::Bottom) {
        out.push(Formula::Top);
        out.push(Formula::Bottom);
    }
    out.extend(f.immediate_subformulas().into_iter().cloned());
    match f {
        Formula::Top | Formula::Bottom => {}
        Formula::Not(g) => out.extend(rewrites(g).into_iter().map(Formula::not)),
        Formula::Diamond(a, g) => {
            out.extend(rewrites(g).into_iter().map(|h| Formula::diamond(*a, h)))
        }
        Formula::Or(l, r) => {
            out.extend(rewrites(l).into_iter().map(|h| Formula::or(h, (**r).clone())));
            out.extend(rewrites(r).into_iter().map(|h| Formula::or((**l).clone(), h)));
        }
        Formula::And(l, r) => {
            out.extend(rewrites(l).into_iter().map(|h| Formula::and(h, (**r).clone())));
            out.extend(rewrites(r).into_iter().map(|h| Formula::and((**l).clone(), h)));
        }
    }
    out
}
