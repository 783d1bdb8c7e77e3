//! Active learning of minimal reachable systems (deterministic automata,
//! Mealy machines and labelled transition systems) from a teacher holding a
//! possibly redundant finite system.
//!
//! Tests are logical: words for automata and Mealy machines, Hennessy-Milner
//! formulas for transition systems. The learner selects teacher states
//! (rather than access words) and separates them with a closed suite of
//! tests; see [`learner::learn`].

pub mod distinguish;
pub mod format;
pub mod learner;
pub mod logic;
pub mod reachability;
pub mod system;
pub mod teacher;

pub use learner::{learn, Conjecture, LearnConfig, LearnError, LearnOutcome, RunTrace, Table};
pub use logic::{eval_test, Formula, Row, Test, TestSuite, TruthValue};
pub use reachability::{logical_quotient, reachable_part, Partition, StateSet};
pub use system::{Alphabet, Kind, PointedSystem, StateId, SystemDraft, SystemError};
pub use teacher::{EquivalenceAnswer, QueryCounters, Teacher};
