//! Finite pointed systems of three kinds: deterministic automata, Mealy
//! machines and labelled transition systems.
//!
//! A [`PointedSystem`] is always valid once constructed. Name-based input
//! (files, hand-written fixtures) goes through [`SystemDraft`], whose
//! [`SystemDraft::validate`] reports every defect instead of stopping at the
//! first one.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Dense index of a state within its system. Ordinal order is load order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Dfa,
    Mealy,
    Lts,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Dfa => "dfa",
            Kind::Mealy => "mealy",
            Kind::Lts => "lts",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = SystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dfa" => Ok(Kind::Dfa),
            "mealy" => Ok(Kind::Mealy),
            "lts" => Ok(Kind::Lts),
            other => Err(SystemError::UnknownKind(other.to_string())),
        }
    }
}

/// An ordered set of distinct symbols. Used both for input letters and for
/// Mealy outputs; the order fixes every tie-break in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbols {
    names: Vec<String>,
}

pub type Alphabet = Symbols;
pub type OutputAlphabet = Symbols;

impl Symbols {
    pub fn new<I, S>(names: I) -> Result<Self, SystemError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(SystemError::EmptySymbols);
        }
        let mut seen = HashSet::new();
        for name in &names {
            if name.is_empty() {
                return Err(SystemError::BlankSymbol);
            }
            if !seen.insert(name.as_str()) {
                return Err(SystemError::DuplicateSymbol(name.clone()));
            }
        }
        Ok(Symbols { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// True when every symbol is one character, so words can be rendered
    /// without separators.
    pub fn is_single_char(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Dynamics {
    Dfa {
        accepting: Vec<bool>,
        next: Vec<Vec<StateId>>,
    },
    /// `step[x][a] = (output index, target)`.
    Mealy { step: Vec<Vec<(usize, StateId)>> },
    /// Successor sets are kept sorted and duplicate-free.
    Lts { succ: Vec<Vec<Vec<StateId>>> },
}

impl Dynamics {
    pub fn kind(&self) -> Kind {
        match self {
            Dynamics::Dfa { .. } => Kind::Dfa,
            Dynamics::Mealy { .. } => Kind::Mealy,
            Dynamics::Lts { .. } => Kind::Lts,
        }
    }

    /// Reassembles dynamics from per-state one-step records, state `i` taking
    /// `steps[i]`.
    pub fn from_steps(kind: Kind, steps: Vec<Step>) -> Result<Self, SystemError> {
        match kind {
            Kind::Dfa => {
                let mut accepting = Vec::with_capacity(steps.len());
                let mut next = Vec::with_capacity(steps.len());
                for step in steps {
                    match step {
                        Step::Dfa { accepting: acc, next: n } => {
                            accepting.push(acc);
                            next.push(n);
                        }
                        other => return Err(SystemError::KindMismatch(kind, other.kind())),
                    }
                }
                Ok(Dynamics::Dfa { accepting, next })
            }
            Kind::Mealy => steps
                .into_iter()
                .map(|step| match step {
                    Step::Mealy { moves } => Ok(moves),
                    other => Err(SystemError::KindMismatch(kind, other.kind())),
                })
                .collect::<Result<_, _>>()
                .map(|step| Dynamics::Mealy { step }),
            Kind::Lts => steps
                .into_iter()
                .map(|step| match step {
                    Step::Lts { succ } => Ok(succ),
                    other => Err(SystemError::KindMismatch(kind, other.kind())),
                })
                .collect::<Result<_, _>>()
                .map(|succ| Dynamics::Lts { succ }),
        }
    }
}

/// The one-step structure of a single state, with successors possibly living
/// in another state space (see [`PointedSystem::retarget`]).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Step {
    Dfa { accepting: bool, next: Vec<StateId> },
    Mealy { moves: Vec<(usize, StateId)> },
    Lts { succ: Vec<Vec<StateId>> },
}

impl Step {
    pub fn kind(&self) -> Kind {
        match self {
            Step::Dfa { .. } => Kind::Dfa,
            Step::Mealy { .. } => Kind::Mealy,
            Step::Lts { .. } => Kind::Lts,
        }
    }

    /// Successors in ordinal order, without duplicates.
    pub fn successors(&self) -> Vec<StateId> {
        let all = match self {
            Step::Dfa { next, .. } => next.clone(),
            Step::Mealy { moves } => moves.iter().map(|&(_, y)| y).collect(),
            Step::Lts { succ } => succ.iter().flatten().copied().collect(),
        };
        normalize(all)
    }

    /// Applies `f` to every successor. LTS successor sets are re-sorted and
    /// deduplicated, as the image of a set under a map.
    pub fn map(&self, mut f: impl FnMut(StateId) -> StateId) -> Step {
        match self {
            Step::Dfa { accepting, next } => Step::Dfa {
                accepting: *accepting,
                next: next.iter().map(|&y| f(y)).collect(),
            },
            Step::Mealy { moves } => Step::Mealy {
                moves: moves.iter().map(|&(o, y)| (o, f(y))).collect(),
            },
            Step::Lts { succ } => Step::Lts {
                succ: succ
                    .iter()
                    .map(|targets| normalize(targets.iter().map(|&y| f(y)).collect()))
                    .collect(),
            },
        }
    }
}

fn normalize(mut states: Vec<StateId>) -> Vec<StateId> {
    states.sort_unstable();
    states.dedup();
    states
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyAlphabet,
    DuplicateLetter(String),
    EmptyOutputs,
    DuplicateOutput(String),
    OutputsOnNonMealy,
    NoStates,
    DuplicateState(String),
    UnknownInitial(String),
    UnknownAccepting(String),
    AcceptingOnNonDfa,
    UnknownSource { state: String, letter: String },
    UnknownLetter { state: String, letter: String },
    UnknownTarget { state: String, letter: String, target: String },
    MissingTransition { state: String, letter: String },
    DuplicateTransition { state: String, letter: String },
    MissingOutput { state: String, letter: String },
    UnknownOutput { state: String, letter: String, output: String },
    UnexpectedOutput { state: String, letter: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyAlphabet => write!(f, "alphabet: must not be empty"),
            Violation::DuplicateLetter(l) => write!(f, "alphabet: duplicate letter {l:?}"),
            Violation::EmptyOutputs => write!(f, "outputs: must not be empty for a mealy machine"),
            Violation::DuplicateOutput(o) => write!(f, "outputs: duplicate output {o:?}"),
            Violation::OutputsOnNonMealy => write!(f, "outputs: only allowed for mealy machines"),
            Violation::NoStates => write!(f, "states: must not be empty"),
            Violation::DuplicateState(s) => write!(f, "states: duplicate state {s:?}"),
            Violation::UnknownInitial(s) => write!(f, "initial: {s:?} is not a declared state"),
            Violation::UnknownAccepting(s) => {
                write!(f, "accepting: {s:?} is not a declared state")
            }
            Violation::AcceptingOnNonDfa => write!(f, "accepting: only allowed for dfas"),
            Violation::UnknownSource { state, letter } => {
                write!(f, "transitions: source {state:?} (letter {letter:?}) is not a declared state")
            }
            Violation::UnknownLetter { state, letter } => {
                write!(f, "transitions: {state:?} uses unknown letter {letter:?}")
            }
            Violation::UnknownTarget { state, letter, target } => write!(
                f,
                "transitions: ({state:?}, {letter:?}) targets undeclared state {target:?}"
            ),
            Violation::MissingTransition { state, letter } => {
                write!(f, "transitions: ({state:?}, {letter:?}) is undefined")
            }
            Violation::DuplicateTransition { state, letter } => {
                write!(f, "transitions: ({state:?}, {letter:?}) is defined more than once")
            }
            Violation::MissingOutput { state, letter } => {
                write!(f, "transitions: ({state:?}, {letter:?}) has no output")
            }
            Violation::UnknownOutput { state, letter, output } => write!(
                f,
                "transitions: ({state:?}, {letter:?}) emits undeclared output {output:?}"
            ),
            Violation::UnexpectedOutput { state, letter } => {
                write!(f, "transitions: ({state:?}, {letter:?}) carries an output but the system is not mealy")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SystemError {
    #[error("unknown system kind {0:?} (expected dfa, mealy or lts)")]
    UnknownKind(String),
    #[error("symbol list must not be empty")]
    EmptySymbols,
    #[error("symbols must be non-empty strings")]
    BlankSymbol,
    #[error("duplicate symbol {0:?}")]
    DuplicateSymbol(String),
    #[error("invalid system:\n{0}")]
    Invalid(ValidationReport),
    #[error("state {0} does not belong to this system")]
    UnknownState(StateId),
    #[error("no state named {0:?}")]
    UnknownStateName(String),
    #[error("no representative for successor {0}; the table is not closed")]
    MissingRepresentative(StateId),
    #[error("expected {0} dynamics, found {1}")]
    KindMismatch(Kind, Kind),
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

/// Name-based description of a system, possibly defective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemDraft {
    pub kind: Kind,
    pub alphabet: Vec<String>,
    pub outputs: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub accepting: Vec<String>,
    pub transitions: Vec<DraftEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DraftEdge {
    pub source: String,
    pub letter: String,
    pub output: Option<String>,
    pub target: String,
}

impl DraftEdge {
    pub fn new(source: &str, letter: &str, target: &str) -> Self {
        DraftEdge {
            source: source.into(),
            letter: letter.into(),
            output: None,
            target: target.into(),
        }
    }

    pub fn with_output(source: &str, letter: &str, output: &str, target: &str) -> Self {
        DraftEdge {
            source: source.into(),
            letter: letter.into(),
            output: Some(output.into()),
            target: target.into(),
        }
    }
}

/// Lists every violated invariant of a drafted system; empty iff the draft
/// builds.
pub fn validate_system(draft: &SystemDraft) -> ValidationReport {
    draft.validate()
}

impl SystemDraft {
    pub fn validate(&self) -> ValidationReport {
        let mut out = Vec::new();

        let letters = index_names(&self.alphabet, &mut out, Violation::DuplicateLetter);
        if self.alphabet.is_empty() {
            out.push(Violation::EmptyAlphabet);
        }
        let outputs = index_names(&self.outputs, &mut out, Violation::DuplicateOutput);
        match self.kind {
            Kind::Mealy if self.outputs.is_empty() => out.push(Violation::EmptyOutputs),
            Kind::Dfa | Kind::Lts if !self.outputs.is_empty() => {
                out.push(Violation::OutputsOnNonMealy)
            }
            _ => {}
        }
        let states = index_names(&self.states, &mut out, Violation::DuplicateState);
        if self.states.is_empty() {
            out.push(Violation::NoStates);
        }
        if !states.contains_key(self.initial.as_str()) {
            out.push(Violation::UnknownInitial(self.initial.clone()));
        }
        if self.kind != Kind::Dfa && !self.accepting.is_empty() {
            out.push(Violation::AcceptingOnNonDfa);
        }
        for name in &self.accepting {
            if !states.contains_key(name.as_str()) {
                out.push(Violation::UnknownAccepting(name.clone()));
            }
        }

        let mut defined: HashMap<(usize, usize), usize> = HashMap::new();
        for edge in &self.transitions {
            let source = states.get(edge.source.as_str());
            let letter = letters.get(edge.letter.as_str());
            if source.is_none() {
                out.push(Violation::UnknownSource {
                    state: edge.source.clone(),
                    letter: edge.letter.clone(),
                });
            }
            if letter.is_none() {
                out.push(Violation::UnknownLetter {
                    state: edge.source.clone(),
                    letter: edge.letter.clone(),
                });
            }
            if !states.contains_key(edge.target.as_str()) {
                out.push(Violation::UnknownTarget {
                    state: edge.source.clone(),
                    letter: edge.letter.clone(),
                    target: edge.target.clone(),
                });
            }
            match (&edge.output, self.kind) {
                (None, Kind::Mealy) => out.push(Violation::MissingOutput {
                    state: edge.source.clone(),
                    letter: edge.letter.clone(),
                }),
                (Some(o), Kind::Mealy) if !outputs.contains_key(o.as_str()) => {
                    out.push(Violation::UnknownOutput {
                        state: edge.source.clone(),
                        letter: edge.letter.clone(),
                        output: o.clone(),
                    })
                }
                (Some(_), Kind::Dfa | Kind::Lts) => out.push(Violation::UnexpectedOutput {
                    state: edge.source.clone(),
                    letter: edge.letter.clone(),
                }),
                _ => {}
            }
            if let (Some(&s), Some(&a)) = (source, letter) {
                *defined.entry((s, a)).or_default() += 1;
            }
        }

        if self.kind != Kind::Lts {
            for (s, state) in self.states.iter().enumerate() {
                for (a, letter) in self.alphabet.iter().enumerate() {
                    match defined.get(&(s, a)).copied().unwrap_or(0) {
                        0 => out.push(Violation::MissingTransition {
                            state: state.clone(),
                            letter: letter.clone(),
                        }),
                        1 => {}
                        _ => out.push(Violation::DuplicateTransition {
                            state: state.clone(),
                            letter: letter.clone(),
                        }),
                    }
                }
            }
        }

        ValidationReport { violations: out }
    }

    pub fn build(&self) -> Result<PointedSystem, SystemError> {
        let report = self.validate();
        if !report.is_empty() {
            return Err(SystemError::Invalid(report));
        }
        let alphabet = Symbols::new(self.alphabet.iter().cloned())?;
        let outputs = match self.kind {
            Kind::Mealy => Some(Symbols::new(self.outputs.iter().cloned())?),
            _ => None,
        };
        let state_index: HashMap<&str, usize> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let n = self.states.len();
        let k = alphabet.len();
        let placeholder = StateId(0);
        let dynamics = match self.kind {
            Kind::Dfa => {
                let mut accepting = vec![false; n];
                for name in &self.accepting {
                    accepting[state_index[name.as_str()]] = true;
                }
                let mut next = vec![vec![placeholder; k]; n];
                for e in &self.transitions {
                    let a = alphabet.index_of(&e.letter).expect("validated");
                    next[state_index[e.source.as_str()]][a] = StateId(state_index[e.target.as_str()]);
                }
                Dynamics::Dfa { accepting, next }
            }
            Kind::Mealy => {
                let outs = outputs.as_ref().expect("mealy outputs");
                let mut step = vec![vec![(0, placeholder); k]; n];
                for e in &self.transitions {
                    let a = alphabet.index_of(&e.letter).expect("validated");
                    let o = outs
                        .index_of(e.output.as_deref().expect("validated"))
                        .expect("validated");
                    step[state_index[e.source.as_str()]][a] = (o, StateId(state_index[e.target.as_str()]));
                }
                Dynamics::Mealy { step }
            }
            Kind::Lts => {
                let mut succ = vec![vec![Vec::new(); k]; n];
                for e in &self.transitions {
                    let a = alphabet.index_of(&e.letter).expect("validated");
                    succ[state_index[e.source.as_str()]][a].push(StateId(state_index[e.target.as_str()]));
                }
                Dynamics::Lts { succ }
            }
        };
        PointedSystem::new(
            alphabet,
            outputs,
            self.states.clone(),
            dynamics,
            StateId(state_index[self.initial.as_str()]),
        )
    }
}

fn index_names<'a>(
    names: &'a [String],
    out: &mut Vec<Violation>,
    duplicate: impl Fn(String) -> Violation,
) -> HashMap<&'a str, usize> {
    let mut index = HashMap::new();
    for (i, name) in names.iter().enumerate() {
        if index.insert(name.as_str(), i).is_some() {
            out.push(duplicate(name.clone()));
        }
    }
    index
}

/// A finite coalgebra of one of the three kinds with a distinguished initial
/// state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedSystem {
    alphabet: Alphabet,
    outputs: Option<OutputAlphabet>,
    states: Vec<String>,
    dynamics: Dynamics,
    initial: StateId,
}

impl PointedSystem {
    /// Builds a system from index-based parts, checking totality and bounds.
    /// LTS successor sets are normalized.
    pub fn new(
        alphabet: Alphabet,
        outputs: Option<OutputAlphabet>,
        states: Vec<String>,
        dynamics: Dynamics,
        initial: StateId,
    ) -> Result<Self, SystemError> {
        let n = states.len();
        let k = alphabet.len();
        if n == 0 {
            return Err(SystemError::Invalid(ValidationReport {
                violations: vec![Violation::NoStates],
            }));
        }
        let mut seen = HashSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(SystemError::Invalid(ValidationReport {
                    violations: vec![Violation::DuplicateState(s.clone())],
                }));
            }
        }
        if initial.0 >= n {
            return Err(SystemError::UnknownState(initial));
        }
        let in_range = |y: &StateId| y.0 < n;
        let dynamics = match dynamics {
            Dynamics::Dfa { accepting, next } => {
                if outputs.is_some() {
                    return Err(SystemError::Shape("dfa must not carry outputs".into()));
                }
                if accepting.len() != n || next.len() != n || next.iter().any(|r| r.len() != k) {
                    return Err(SystemError::Shape("dfa tables must be states x letters".into()));
                }
                if !next.iter().flatten().all(in_range) {
                    return Err(SystemError::Shape("dfa target out of range".into()));
                }
                Dynamics::Dfa { accepting, next }
            }
            Dynamics::Mealy { step } => {
                let Some(outs) = outputs.as_ref() else {
                    return Err(SystemError::Shape("mealy machine needs outputs".into()));
                };
                if step.len() != n || step.iter().any(|r| r.len() != k) {
                    return Err(SystemError::Shape("mealy table must be states x letters".into()));
                }
                if !step.iter().flatten().all(|(o, y)| *o < outs.len() && in_range(y)) {
                    return Err(SystemError::Shape("mealy output or target out of range".into()));
                }
                Dynamics::Mealy { step }
            }
            Dynamics::Lts { succ } => {
                if outputs.is_some() {
                    return Err(SystemError::Shape("lts must not carry outputs".into()));
                }
                if succ.len() != n || succ.iter().any(|r| r.len() != k) {
                    return Err(SystemError::Shape("lts table must be states x letters".into()));
                }
                if !succ.iter().flatten().flatten().all(in_range) {
                    return Err(SystemError::Shape("lts target out of range".into()));
                }
                Dynamics::Lts {
                    succ: succ
                        .into_iter()
                        .map(|row| row.into_iter().map(normalize).collect())
                        .collect(),
                }
            }
        };
        Ok(PointedSystem {
            alphabet,
            outputs,
            states,
            dynamics,
            initial,
        })
    }

    pub fn kind(&self) -> Kind {
        self.dynamics.kind()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn outputs(&self) -> Option<&OutputAlphabet> {
        self.outputs.as_ref()
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len()).map(StateId)
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn name(&self, x: StateId) -> &str {
        &self.states[x.0]
    }

    pub fn state(&self, name: &str) -> Result<StateId, SystemError> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(StateId)
            .ok_or_else(|| SystemError::UnknownStateName(name.to_string()))
    }

    pub fn contains(&self, x: StateId) -> bool {
        x.0 < self.states.len()
    }

    fn check(&self, x: StateId) -> Result<(), SystemError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(SystemError::UnknownState(x))
        }
    }

    /// Same system, pointed at another state.
    pub fn with_initial(&self, x: StateId) -> Result<Self, SystemError> {
        self.check(x)?;
        Ok(PointedSystem {
            initial: x,
            ..self.clone()
        })
    }

    /// Same structure with states renamed `prefix0`, `prefix1`, ...
    pub fn renamed(&self, prefix: &str) -> Self {
        PointedSystem {
            states: (0..self.states.len()).map(|i| format!("{prefix}{i}")).collect(),
            ..self.clone()
        }
    }

    pub fn is_accepting(&self, x: StateId) -> Option<bool> {
        match &self.dynamics {
            Dynamics::Dfa { accepting, .. } => accepting.get(x.0).copied(),
            _ => None,
        }
    }

    /// Deterministic successor on `letter`; `None` for LTSs.
    pub fn next(&self, x: StateId, letter: usize) -> Option<StateId> {
        match &self.dynamics {
            Dynamics::Dfa { next, .. } => Some(next[x.0][letter]),
            Dynamics::Mealy { step } => Some(step[x.0][letter].1),
            Dynamics::Lts { .. } => None,
        }
    }

    pub fn output(&self, x: StateId, letter: usize) -> Option<usize> {
        match &self.dynamics {
            Dynamics::Mealy { step } => Some(step[x.0][letter].0),
            _ => None,
        }
    }

    /// Targets of `letter` from `x` for any kind (singleton for DFA/Mealy).
    pub fn targets(&self, x: StateId, letter: usize) -> &[StateId] {
        match &self.dynamics {
            Dynamics::Dfa { next, .. } => std::slice::from_ref(&next[x.0][letter]),
            Dynamics::Mealy { step } => std::slice::from_ref(&step[x.0][letter].1),
            Dynamics::Lts { succ } => &succ[x.0][letter],
        }
    }

    /// All one-step successors of `x`, deduplicated and ordered by ordinal.
    pub fn successors(&self, x: StateId) -> Result<Vec<StateId>, SystemError> {
        self.check(x)?;
        let all = (0..self.alphabet.len())
            .flat_map(|a| self.targets(x, a).iter().copied())
            .collect();
        Ok(normalize(all))
    }

    pub fn step(&self, x: StateId) -> Result<Step, SystemError> {
        self.check(x)?;
        Ok(match &self.dynamics {
            Dynamics::Dfa { accepting, next } => Step::Dfa {
                accepting: accepting[x.0],
                next: next[x.0].clone(),
            },
            Dynamics::Mealy { step } => Step::Mealy {
                moves: step[x.0].clone(),
            },
            Dynamics::Lts { succ } => Step::Lts {
                succ: succ[x.0].clone(),
            },
        })
    }

    /// The one-step structure of `x` with every successor `y` replaced by
    /// `rep(y)`. Fails if `rep` is undefined on some successor.
    pub fn retarget(
        &self,
        x: StateId,
        rep: impl Fn(StateId) -> Option<StateId>,
    ) -> Result<Step, SystemError> {
        let step = self.step(x)?;
        for y in self.successors(x)? {
            if rep(y).is_none() {
                return Err(SystemError::MissingRepresentative(y));
            }
        }
        Ok(step.map(|y| rep(y).expect("checked above")))
    }
}
