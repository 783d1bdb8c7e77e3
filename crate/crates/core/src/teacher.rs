//! The oracle side of the learning game.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::distinguish::distinguishing_test;
use crate::logic::{eval_test, LogicError, Row, Test, TestSuite, TruthValue};
use crate::system::{PointedSystem, StateId, Step, SystemError};

#[derive(Debug, Error)]
pub enum TeacherError {
    #[error("conjecture does not match the teacher: {0}")]
    Protocol(SystemError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    System(#[from] SystemError),
}

/// Number of queries answered so far.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct QueryCounters {
    /// Distinct (state, test) evaluations.
    pub membership: usize,
    pub equivalence: usize,
    /// States whose successors were requested.
    pub base: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivalenceAnswer {
    Correct,
    Counterexample(Test),
}

/// Holds the target system and answers theory, base and equivalence queries.
#[derive(Debug, Clone)]
pub struct Teacher {
    system: PointedSystem,
    counters: QueryCounters,
    memo: HashMap<(StateId, Test), TruthValue>,
    scripted: VecDeque<Test>,
}

impl Teacher {
    pub fn new(system: PointedSystem) -> Self {
        Teacher {
            system,
            counters: QueryCounters::default(),
            memo: HashMap::new(),
            scripted: VecDeque::new(),
        }
    }

    /// Replays the given counterexamples, in order, before falling back to
    /// synthesized ones. A scripted test is only handed out while it actually
    /// separates the conjecture from the target; otherwise it is skipped.
    pub fn with_scripted_counterexamples(mut self, tests: impl IntoIterator<Item = Test>) -> Self {
        self.scripted.extend(tests);
        self
    }

    pub fn system(&self) -> &PointedSystem {
        &self.system
    }

    pub fn counters(&self) -> QueryCounters {
        self.counters
    }

    pub fn initial(&self) -> StateId {
        self.system.initial()
    }

    fn value(&mut self, x: StateId, t: &Test) -> Result<TruthValue, TeacherError> {
        if let Some(v) = self.memo.get(&(x, t.clone())) {
            return Ok(*v);
        }
        let v = eval_test(&self.system, x, t)?;
        self.counters.membership += 1;
        self.memo.insert((x, t.clone()), v);
        Ok(v)
    }

    /// The row of a single state. Cells already evaluated in this run are
    /// served from the cache and not counted again.
    pub fn row(&mut self, x: StateId, suite: &TestSuite) -> Result<Row, TeacherError> {
        suite
            .iter()
            .map(|t| self.value(x, t))
            .collect::<Result<_, _>>()
            .map(Row)
    }

    pub fn fill_rows(
        &mut self,
        states: &[StateId],
        suite: &TestSuite,
    ) -> Result<HashMap<StateId, Row>, TeacherError> {
        states
            .iter()
            .map(|&x| Ok((x, self.row(x, suite)?)))
            .collect()
    }

    pub fn base_query(
        &mut self,
        states: &[StateId],
    ) -> Result<HashMap<StateId, Vec<StateId>>, TeacherError> {
        let mut out = HashMap::new();
        for &x in states {
            out.insert(x, self.system.successors(x)?);
            self.counters.base += 1;
        }
        Ok(out)
    }

    /// The one-step structure of `x`: its successors together with the
    /// acceptance bit or outputs needed to build a conjecture.
    pub fn step(&mut self, x: StateId) -> Result<Step, TeacherError> {
        let step = self.system.step(x)?;
        self.counters.base += 1;
        Ok(step)
    }

    /// `Correct` iff the conjecture's initial state is logically equivalent to
    /// the target's; otherwise a test separating the two.
    pub fn equivalence_query(
        &mut self,
        conjecture: &PointedSystem,
    ) -> Result<EquivalenceAnswer, TeacherError> {
        self.check_compatible(conjecture)?;
        self.counters.equivalence += 1;
        while let Some(t) = self.scripted.pop_front() {
            if self.verify_counterexample(conjecture, &t)? {
                return Ok(EquivalenceAnswer::Counterexample(t));
            }
        }
        match distinguishing_test(&self.system, conjecture).map_err(TeacherError::Protocol)? {
            None => Ok(EquivalenceAnswer::Correct),
            Some(t) => {
                assert!(
                    self.verify_counterexample(conjecture, &t)?,
                    "synthesized counterexample does not separate the initial states"
                );
                Ok(EquivalenceAnswer::Counterexample(t))
            }
        }
    }

    fn check_compatible(&self, conjecture: &PointedSystem) -> Result<(), TeacherError> {
        if conjecture.kind() != self.system.kind() {
            return Err(TeacherError::Protocol(SystemError::KindMismatch(
                self.system.kind(),
                conjecture.kind(),
            )));
        }
        if conjecture.alphabet() != self.system.alphabet()
            || conjecture.outputs() != self.system.outputs()
        {
            return Err(TeacherError::Protocol(SystemError::Shape(
                "alphabets differ".into(),
            )));
        }
        Ok(())
    }

    /// Whether `t` takes different values at the two initial states.
    pub fn verify_counterexample(
        &self,
        conjecture: &PointedSystem,
        t: &Test,
    ) -> Result<bool, TeacherError> {
        self.check_compatible(conjecture)?;
        let ours = eval_test(&self.system, self.system.initial(), t)?;
        let theirs = eval_test(conjecture, conjecture.initial(), t)
            .map_err(|e| match e {
                LogicError::System(s) => TeacherError::Protocol(s),
                other => TeacherError::Logic(other),
            })?;
        Ok(ours != theirs)
    }
}
