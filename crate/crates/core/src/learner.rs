//! Tables of selected teacher states against closed test suites, and the
//! learning loop built on them.
//!
//! A table selects states of the teacher's system (not access words) and
//! records their rows over the current suite. The loop alternates between
//! closing the table, building a conjecture from it, and extending the suite
//! with the closure of the teacher's counterexample.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::logic::{LogicError, Row, Test, TestSuite};
use crate::system::{Dynamics, PointedSystem, StateId, Step, SystemError};
use crate::teacher::{EquivalenceAnswer, QueryCounters, Teacher, TeacherError};

#[derive(Debug, Error)]
pub enum LearnError {
    #[error(transparent)]
    Teacher(#[from] TeacherError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("table is not closed: successor {successor} of {state} has no matching row")]
    NotClosed { state: StateId, successor: StateId },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("no correct conjecture after {0} outer iterations")]
    IterationBound(usize),
}

impl LearnError {
    /// Errors that can only come from a bug in the learner itself.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            LearnError::NotClosed { .. } | LearnError::Invariant(_) | LearnError::IterationBound(_)
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct LearnConfig {
    /// Check sharpness, initial preservation and prefix-closedness after every
    /// step.
    pub check_invariants: bool,
    /// Defaults to the number of teacher states plus one.
    pub max_outer_iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Closedness {
    Closed,
    /// `successor` of the selected `state` has a row no selected state has.
    Open { state: StateId, successor: StateId },
}

/// Selected states with their rows over a closed suite. The first selected
/// state is the teacher's initial state.
#[derive(Debug, Clone)]
pub struct Table {
    selected: Vec<StateId>,
    suite: TestSuite,
    rows: Vec<Row>,
    index: HashMap<Row, usize>,
    steps: HashMap<StateId, Step>,
}

impl Table {
    pub fn selected(&self) -> &[StateId] {
        &self.selected
    }

    pub fn suite(&self) -> &TestSuite {
        &self.suite
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn initial(&self) -> StateId {
        self.selected[0]
    }

    /// Position of the selected state whose row equals `row`.
    pub fn find(&self, row: &Row) -> Option<usize> {
        self.index.get(row).copied()
    }

    pub fn is_sharp(&self) -> bool {
        self.index.len() == self.rows.len()
    }

    fn push(&mut self, x: StateId, row: Row) {
        self.index.insert(row.clone(), self.rows.len());
        self.selected.push(x);
        self.rows.push(row);
    }

    fn step(&mut self, teacher: &mut Teacher, x: StateId) -> Result<Step, LearnError> {
        if let Some(step) = self.steps.get(&x) {
            return Ok(step.clone());
        }
        let step = teacher.step(x)?;
        self.steps.insert(x, step.clone());
        Ok(step)
    }

    fn refill(&mut self, teacher: &mut Teacher) -> Result<(), LearnError> {
        self.rows = self
            .selected
            .iter()
            .map(|&x| teacher.row(x, &self.suite))
            .collect::<Result<_, _>>()?;
        self.index = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), i))
            .collect();
        Ok(())
    }
}

/// The table `({initial}, empty suite)`.
pub fn init_table(teacher: &mut Teacher) -> Result<Table, LearnError> {
    let suite = TestSuite::empty(teacher.system().kind());
    let x0 = teacher.initial();
    let mut table = Table {
        selected: Vec::new(),
        suite,
        rows: Vec::new(),
        index: HashMap::new(),
        steps: HashMap::new(),
    };
    let row = teacher.row(x0, &table.suite)?;
    table.push(x0, row);
    Ok(table)
}

/// The first successor (selection order, then ordinal order) whose row is
/// missing from the table.
pub fn is_closed(table: &mut Table, teacher: &mut Teacher) -> Result<Closedness, LearnError> {
    for i in 0..table.selected.len() {
        let x = table.selected[i];
        for y in table.step(teacher, x)?.successors() {
            let row = teacher.row(y, &table.suite)?;
            if table.find(&row).is_none() {
                return Ok(Closedness::Open {
                    state: x,
                    successor: y,
                });
            }
        }
    }
    Ok(Closedness::Closed)
}

pub fn close_table(mut table: Table, teacher: &mut Teacher) -> Result<Table, LearnError> {
    close_with(&mut table, teacher, &mut |_, _, _, _| {})?;
    Ok(table)
}

/// Rounds of: scan successors of every currently selected state and append
/// the first state of each row not yet present. Stops after a round that
/// adds nothing, at which point the table is closed.
fn close_with(
    table: &mut Table,
    teacher: &mut Teacher,
    on_add: &mut dyn FnMut(&Table, StateId, StateId, &Row),
) -> Result<(), LearnError> {
    loop {
        let mut added = false;
        let frontier = table.selected.len();
        for i in 0..frontier {
            let x = table.selected[i];
            for y in table.step(teacher, x)?.successors() {
                let row = teacher.row(y, &table.suite)?;
                if table.find(&row).is_none() {
                    table.push(y, row.clone());
                    on_add(table, y, x, &row);
                    added = true;
                }
            }
        }
        if !added {
            return Ok(());
        }
    }
}

/// A learned system on the table's selected states.
#[derive(Debug, Clone)]
pub struct Conjecture {
    pub system: PointedSystem,
    /// Teacher state behind each conjecture state.
    pub representatives: Vec<StateId>,
}

/// Redirects every successor of a selected state to the selected state with
/// the same row. States are named `s0`, `s1`, ... in selection order.
pub fn build_conjecture(table: &mut Table, teacher: &mut Teacher) -> Result<Conjecture, LearnError> {
    let mut steps = Vec::with_capacity(table.selected.len());
    for i in 0..table.selected.len() {
        let x = table.selected[i];
        let step = table.step(teacher, x)?;
        let mut rep = HashMap::new();
        for y in step.successors() {
            let row = teacher.row(y, &table.suite)?;
            match table.find(&row) {
                Some(j) => {
                    rep.insert(y, StateId(j));
                }
                None => {
                    return Err(LearnError::NotClosed {
                        state: x,
                        successor: y,
                    })
                }
            }
        }
        steps.push(step.map(|y| rep[&y]));
    }
    let sys = teacher.system();
    let system = PointedSystem::new(
        sys.alphabet().clone(),
        sys.outputs().cloned(),
        (0..table.selected.len()).map(|i| format!("s{i}")).collect(),
        Dynamics::from_steps(sys.kind(), steps)?,
        StateId(0),
    )?;
    Ok(Conjecture {
        system,
        representatives: table.selected.clone(),
    })
}

/// Extends the suite by the closure of `t` and recomputes the rows.
pub fn add_counterexample(
    mut table: Table,
    t: &Test,
    teacher: &mut Teacher,
) -> Result<Table, LearnError> {
    let letters = teacher.system().alphabet().len();
    if table.suite.insert_closed(t.clone(), letters)? {
        table.refill(teacher)?;
    }
    Ok(table)
}

/// Checks sharpness, that the first selected state is the teacher's initial
/// state, and that every later selected state is a successor of an earlier
/// one.
pub fn check_table(table: &Table, sys: &PointedSystem) -> Result<(), LearnError> {
    if !table.is_sharp() {
        return Err(LearnError::Invariant("table is not sharp".into()));
    }
    if table.initial() != sys.initial() {
        return Err(LearnError::Invariant("initial entry changed".into()));
    }
    for (i, &x) in table.selected.iter().enumerate().skip(1) {
        let reached = table.selected[..i]
            .iter()
            .any(|&p| sys.successors(p).is_ok_and(|s| s.contains(&x)));
        if !reached {
            return Err(LearnError::Invariant(format!(
                "{} is not a successor of an earlier selected state",
                sys.name(x)
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    TableSnapshot {
        selected: Vec<String>,
        suite: Vec<String>,
        rows: Vec<String>,
    },
    ClosingAddition {
        state: String,
        from: String,
        row: String,
    },
    ConjectureBuilt {
        states: usize,
        /// Learned state name and the teacher state it stands for.
        representatives: Vec<(String, String)>,
    },
    EquivalenceResult {
        correct: bool,
        counterexample: Option<String>,
    },
    CounterexampleAdded {
        test: String,
        suite_size: usize,
    },
    Finished {
        states: usize,
        outer_iterations: usize,
        counters: QueryCounters,
    },
}

#[derive(Debug, Clone, Default)]
pub struct RunTrace {
    pub events: Vec<TraceEvent>,
    pub counters: QueryCounters,
    pub outer_iterations: usize,
    /// Selected states at the end of the run; states are never removed.
    pub states_added: usize,
    pub invariant_checks: usize,
    pub counterexamples: Vec<Test>,
}

impl RunTrace {
    /// Teacher names of every state that ever entered the table.
    pub fn selected_names(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        for e in &self.events {
            let new: Vec<&String> = match e {
                TraceEvent::TableSnapshot { selected, .. } => selected.iter().collect(),
                TraceEvent::ClosingAddition { state, .. } => vec![state],
                _ => vec![],
            };
            for n in new {
                if !names.contains(n) {
                    names.push(n.clone());
                }
            }
        }
        names
    }

    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("trace events serialize"));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub conjecture: Conjecture,
    pub table: Table,
    pub trace: RunTrace,
}

fn snapshot(table: &Table, teacher: &Teacher) -> TraceEvent {
    let sys = teacher.system();
    TraceEvent::TableSnapshot {
        selected: table.selected.iter().map(|&x| sys.name(x).to_string()).collect(),
        suite: table.suite.render(sys.alphabet()),
        rows: table.rows.iter().map(|r| r.render(sys.outputs())).collect(),
    }
}

/// Runs the learning loop until the teacher accepts a conjecture.
pub fn learn(teacher: &mut Teacher, config: &LearnConfig) -> Result<LearnOutcome, LearnError> {
    let bound = config
        .max_outer_iterations
        .unwrap_or(teacher.system().num_states() + 1);
    let mut trace = RunTrace::default();
    // Invariants are checked against a private copy so that checks can run
    // while the teacher is busy answering queries.
    let target = teacher.system().clone();
    let check = |table: &Table, trace: &mut RunTrace| {
        if config.check_invariants {
            trace.invariant_checks += 1;
            check_table(table, &target)
        } else {
            Ok(())
        }
    };

    let mut table = init_table(teacher)?;
    trace.events.push(snapshot(&table, teacher));
    check(&table, &mut trace)?;

    loop {
        if trace.outer_iterations == bound {
            return Err(LearnError::IterationBound(bound));
        }
        trace.outer_iterations += 1;

        let mut additions = Vec::new();
        let mut failure = None;
        close_with(&mut table, teacher, &mut |t, y, x, row| {
            additions.push((y, x, row.clone()));
            if failure.is_none() {
                failure = check(t, &mut trace).err();
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        let sys = teacher.system();
        for (y, x, row) in additions {
            trace.events.push(TraceEvent::ClosingAddition {
                state: sys.name(y).to_string(),
                from: sys.name(x).to_string(),
                row: row.render(sys.outputs()),
            });
        }
        check(&table, &mut trace)?;
        trace.events.push(snapshot(&table, teacher));

        let conjecture = build_conjecture(&mut table, teacher)?;
        let sys = teacher.system();
        trace.events.push(TraceEvent::ConjectureBuilt {
            states: conjecture.system.num_states(),
            representatives: conjecture
                .representatives
                .iter()
                .enumerate()
                .map(|(i, &x)| (conjecture.system.name(StateId(i)).to_string(), sys.name(x).to_string()))
                .collect(),
        });

        match teacher.equivalence_query(&conjecture.system)? {
            EquivalenceAnswer::Correct => {
                trace.events.push(TraceEvent::EquivalenceResult {
                    correct: true,
                    counterexample: None,
                });
                trace.counters = teacher.counters();
                trace.states_added = table.selected.len();
                trace.events.push(TraceEvent::Finished {
                    states: conjecture.system.num_states(),
                    outer_iterations: trace.outer_iterations,
                    counters: trace.counters,
                });
                return Ok(LearnOutcome {
                    conjecture,
                    table,
                    trace,
                });
            }
            EquivalenceAnswer::Counterexample(t) => {
                let rendered = t.display(teacher.system().alphabet()).to_string();
                trace.events.push(TraceEvent::EquivalenceResult {
                    correct: false,
                    counterexample: Some(rendered.clone()),
                });
                table = add_counterexample(table, &t, teacher)?;
                trace.events.push(TraceEvent::CounterexampleAdded {
                    test: rendered,
                    suite_size: table.suite.len(),
                });
                trace.counterexamples.push(t);
                check(&table, &mut trace)?;
            }
        }
    }
}
