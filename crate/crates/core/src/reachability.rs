//! Successor closure, reachable parts and logical quotients.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::system::{Dynamics, Kind, PointedSystem, StateId, Step, SystemError};

/// An ordered subset of a system's states.
pub type StateSet = BTreeSet<StateId>;

/// All one-step successors of the states in `set`.
pub fn gamma(sys: &PointedSystem, set: &StateSet) -> Result<StateSet, SystemError> {
    let mut out = StateSet::new();
    for &x in set {
        out.extend(sys.successors(x)?);
    }
    Ok(out)
}

/// `set` carries a subsystem iff it contains all successors of its states.
pub fn is_subcoalgebra(sys: &PointedSystem, set: &StateSet) -> Result<bool, SystemError> {
    Ok(gamma(sys, set)?.is_subset(set))
}

/// Least fixpoint of `S -> gamma(S) + {initial}`, by Kleene iteration from
/// the empty set. Also returns the number of iterations until stable.
pub fn reachable_part_with_steps(sys: &PointedSystem) -> (StateSet, usize) {
    let mut current = StateSet::new();
    let mut steps = 0;
    loop {
        let mut next = gamma(sys, &current).expect("states of sys");
        next.insert(sys.initial());
        steps += 1;
        if next == current {
            return (current, steps);
        }
        current = next;
    }
}

pub fn reachable_part(sys: &PointedSystem) -> StateSet {
    reachable_part_with_steps(sys).0
}

/// Breadth-first states reachable from the initial state, in discovery order.
pub fn bfs_order(sys: &PointedSystem) -> Vec<StateId> {
    let mut seen = vec![false; sys.num_states()];
    let mut order = vec![sys.initial()];
    seen[sys.initial().0] = true;
    let mut queue = VecDeque::from([sys.initial()]);
    while let Some(x) = queue.pop_front() {
        for a in 0..sys.alphabet().len() {
            for &y in sys.targets(x, a) {
                if !seen[y.0] {
                    seen[y.0] = true;
                    order.push(y);
                    queue.push_back(y);
                }
            }
        }
    }
    order
}

/// The subsystem on `set`, states renumbered in ordinal order. `set` must be
/// a subcoalgebra containing the initial state.
pub fn restrict(sys: &PointedSystem, set: &StateSet) -> Result<PointedSystem, SystemError> {
    if !set.contains(&sys.initial()) {
        return Err(SystemError::UnknownState(sys.initial()));
    }
    let index: HashMap<StateId, StateId> = set
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, StateId(i)))
        .collect();
    let steps = set
        .iter()
        .map(|&x| sys.retarget(x, |y| index.get(&y).copied()))
        .collect::<Result<Vec<_>, _>>()?;
    PointedSystem::new(
        sys.alphabet().clone(),
        sys.outputs().cloned(),
        set.iter().map(|&x| sys.name(x).to_string()).collect(),
        Dynamics::from_steps(sys.kind(), steps)?,
        index[&sys.initial()],
    )
}

/// Block assignment of every state; blocks are numbered densely in order of
/// their smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    block: Vec<usize>,
    count: usize,
}

impl Partition {
    fn from_keys<K: std::hash::Hash + Eq>(keys: Vec<K>) -> Self {
        let mut ids = HashMap::new();
        let block = keys
            .into_iter()
            .map(|k| {
                let next = ids.len();
                *ids.entry(k).or_insert(next)
            })
            .collect();
        Partition {
            block,
            count: ids.len(),
        }
    }

    pub fn block_of(&self, x: StateId) -> usize {
        self.block[x.0]
    }

    pub fn num_blocks(&self) -> usize {
        self.count
    }

    pub fn same_block(&self, x: StateId, y: StateId) -> bool {
        self.block[x.0] == self.block[y.0]
    }

    /// Members of each block, in ordinal order.
    pub fn blocks(&self) -> Vec<Vec<StateId>> {
        let mut out = vec![Vec::new(); self.count];
        for (x, &b) in self.block.iter().enumerate() {
            out[b].push(StateId(x));
        }
        out
    }
}

/// The observation a state makes without taking a step: acceptance for DFAs,
/// per-letter outputs for Mealy machines, nothing for LTSs.
fn local_observation(sys: &PointedSystem, x: StateId) -> Vec<usize> {
    match sys.kind() {
        Kind::Dfa => vec![sys.is_accepting(x).expect("dfa") as usize],
        Kind::Mealy => (0..sys.alphabet().len())
            .map(|a| sys.output(x, a).expect("mealy"))
            .collect(),
        Kind::Lts => Vec::new(),
    }
}

/// Every level of signature refinement: level 0 separates by local
/// observation, level k+1 additionally by the per-letter sets of level-k
/// blocks of successors. The last level is stable and is the logical
/// equivalence of the system.
pub fn refinement_levels(sys: &PointedSystem) -> Vec<Partition> {
    let initial = Partition::from_keys(sys.state_ids().map(|x| local_observation(sys, x)).collect());
    let mut levels = vec![initial];
    loop {
        let prev = levels.last().expect("non-empty");
        let keys = sys
            .state_ids()
            .map(|x| {
                let succ: Vec<BTreeSet<usize>> = (0..sys.alphabet().len())
                    .map(|a| sys.targets(x, a).iter().map(|&y| prev.block_of(y)).collect())
                    .collect();
                (prev.block_of(x), succ)
            })
            .collect();
        let next = Partition::from_keys(keys);
        if next.num_blocks() == prev.num_blocks() {
            return levels;
        }
        levels.push(next);
    }
}

/// Logical equivalence classes of all states: language equivalence for
/// DFAs, output equivalence for Mealy machines and bisimilarity for LTSs.
pub fn logical_partition(sys: &PointedSystem) -> Partition {
    refinement_levels(sys).pop().expect("non-empty")
}

/// The partition by logical equivalence together with the quotient system on
/// blocks reachable from the initial block. Each quotient state is named
/// after the smallest member of its block.
pub fn logical_quotient(sys: &PointedSystem) -> (Partition, PointedSystem) {
    let partition = logical_partition(sys);
    let blocks = partition.blocks();
    let reps: Vec<StateId> = blocks.iter().map(|members| members[0]).collect();
    let block_step = |b: usize| -> Step {
        sys.step(reps[b])
            .expect("state of sys")
            .map(|y| StateId(partition.block_of(y)))
    };

    // Blocks reachable from the initial block.
    let start = partition.block_of(sys.initial());
    let mut seen = vec![false; blocks.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(b) = queue.pop_front() {
        for a in 0..sys.alphabet().len() {
            for &y in sys.targets(reps[b], a) {
                let c = partition.block_of(y);
                if !seen[c] {
                    seen[c] = true;
                    queue.push_back(c);
                }
            }
        }
    }
    let kept: Vec<usize> = (0..blocks.len()).filter(|&b| seen[b]).collect();
    let renumber: HashMap<usize, StateId> = kept
        .iter()
        .enumerate()
        .map(|(i, &b)| (b, StateId(i)))
        .collect();
    let steps = kept
        .iter()
        .map(|&b| block_step(b).map(|c| renumber[&c.0]))
        .collect();
    let quotient = PointedSystem::new(
        sys.alphabet().clone(),
        sys.outputs().cloned(),
        kept.iter().map(|&b| sys.name(reps[b]).to_string()).collect(),
        Dynamics::from_steps(sys.kind(), steps).expect("same kind"),
        renumber[&start],
    )
    .expect("quotient of a valid system is valid");
    (partition, quotient)
}

/// Disjoint union of two systems of the same kind and alphabet. States of
/// `right` are shifted by `left.num_states()`; the initial state is `left`'s.
pub fn disjoint_union(left: &PointedSystem, right: &PointedSystem) -> Result<PointedSystem, SystemError> {
    if left.kind() != right.kind() {
        return Err(SystemError::KindMismatch(left.kind(), right.kind()));
    }
    if left.alphabet() != right.alphabet() || left.outputs() != right.outputs() {
        return Err(SystemError::Shape("alphabets differ".into()));
    }
    let shift = left.num_states();
    let mut steps: Vec<Step> = left.state_ids().map(|x| left.step(x).expect("own state")).collect();
    steps.extend(
        right
            .state_ids()
            .map(|x| right.step(x).expect("own state").map(|y| StateId(y.0 + shift))),
    );
    let names = left
        .state_names()
        .iter()
        .map(|n| format!("l.{n}"))
        .chain(right.state_names().iter().map(|n| format!("r.{n}")))
        .collect();
    PointedSystem::new(
        left.alphabet().clone(),
        left.outputs().cloned(),
        names,
        Dynamics::from_steps(left.kind(), steps)?,
        left.initial(),
    )
}

/// Whether the initial states of two systems are logically equivalent.
pub fn equivalent(left: &PointedSystem, right: &PointedSystem) -> Result<bool, SystemError> {
    let union = disjoint_union(left, right)?;
    let partition = logical_partition(&union);
    Ok(partition.same_block(left.initial(), StateId(right.initial().0 + left.num_states())))
}

/// Structural isomorphism of pointed systems (state names ignored): a
/// bijection of states preserving the initial state and every transition,
/// acceptance bit and output.
pub fn isomorphic(left: &PointedSystem, right: &PointedSystem) -> bool {
    if left.kind() != right.kind()
        || left.alphabet() != right.alphabet()
        || left.outputs() != right.outputs()
        || left.num_states() != right.num_states()
    {
        return false;
    }
    let Ok(union) = disjoint_union(left, right) else {
        return false;
    };
    // An isomorphism maps every state to a logically equivalent one, so
    // candidates are restricted to the same block of the union.
    let partition = logical_partition(&union);
    let n = left.num_states();
    let candidates: Vec<Vec<StateId>> = left
        .state_ids()
        .map(|x| {
            right
                .state_ids()
                .filter(|y| partition.same_block(x, StateId(y.0 + n)))
                .collect()
        })
        .collect();
    let mut map: Vec<Option<StateId>> = vec![None; n];
    let mut used = vec![false; n];
    if !partition.same_block(left.initial(), StateId(right.initial().0 + n)) {
        return false;
    }
    map[left.initial().0] = Some(right.initial());
    used[right.initial().0] = true;
    let order: Vec<StateId> = left.state_ids().filter(|&x| x != left.initial()).collect();
    extend_iso(left, right, &candidates, &order, 0, &mut map, &mut used)
}

fn extend_iso(
    left: &PointedSystem,
    right: &PointedSystem,
    candidates: &[Vec<StateId>],
    order: &[StateId],
    depth: usize,
    map: &mut Vec<Option<StateId>>,
    used: &mut Vec<bool>,
) -> bool {
    if depth == order.len() {
        let total: Vec<StateId> = map.iter().map(|m| m.expect("complete")).collect();
        return left.state_ids().all(|x| {
            left.step(x).expect("own state").map(|y| total[y.0])
                == right.step(total[x.0]).expect("own state")
        });
    }
    let x = order[depth];
    for &y in &candidates[x.0] {
        if used[y.0] {
            continue;
        }
        map[x.0] = Some(y);
        used[y.0] = true;
        if extend_iso(left, right, candidates, order, depth + 1, map, used) {
            return true;
        }
        map[x.0] = None;
        used[y.0] = false;
    }
    false
}
