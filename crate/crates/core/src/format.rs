//! JSON system files and DOT rendering.
//!
//! ```json
//! {
//!   "kind": "dfa",
//!   "alphabet": ["a", "b"],
//!   "states": ["q0", "q1"],
//!   "initial": "q0",
//!   "accepting": ["q0"],
//!   "transitions": {
//!     "q0": { "a": "q1", "b": "q0" },
//!     "q1": { "a": "q0", "b": "q1" }
//!   }
//! }
//! ```
//!
//! Mealy transitions map a letter to `[output, target]` and need an
//! `outputs` list; LTS transitions map a letter to a list of targets.

use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::system::{DraftEdge, Dynamics, Kind, PointedSystem, SystemDraft, SystemError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed system file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("transitions.{state}.{letter}: {msg}")]
    Transition {
        state: String,
        letter: String,
        msg: String,
    },
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub kind: String,
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepting: Option<Vec<String>>,
    pub transitions: IndexMap<String, IndexMap<String, Value>>,
}

impl SystemFile {
    pub fn to_draft(&self) -> Result<SystemDraft, FormatError> {
        let kind: Kind = self.kind.parse()?;
        let mut transitions = Vec::new();
        for (state, by_letter) in &self.transitions {
            for (letter, value) in by_letter {
                let bad = |msg: &str| FormatError::Transition {
                    state: state.clone(),
                    letter: letter.clone(),
                    msg: msg.to_string(),
                };
                match kind {
                    Kind::Dfa => {
                        let target = value.as_str().ok_or_else(|| bad("expected a state name"))?;
                        transitions.push(DraftEdge::new(state, letter, target));
                    }
                    Kind::Mealy => {
                        let pair = value
                            .as_array()
                            .filter(|a| a.len() == 2)
                            .ok_or_else(|| bad("expected [output, state]"))?;
                        let (Some(output), Some(target)) = (pair[0].as_str(), pair[1].as_str())
                        else {
                            return Err(bad("expected [output, state]"));
                        };
                        transitions.push(DraftEdge::with_output(state, letter, output, target));
                    }
                    Kind::Lts => {
                        let targets = value
                            .as_array()
                            .ok_or_else(|| bad("expected a list of state names"))?;
                        for t in targets {
                            let target = t.as_str().ok_or_else(|| bad("expected a state name"))?;
                            transitions.push(DraftEdge::new(state, letter, target));
                        }
                    }
                }
            }
        }
        Ok(SystemDraft {
            kind,
            alphabet: self.alphabet.clone(),
            outputs: self.outputs.clone(),
            states: self.states.clone(),
            initial: self.initial.clone(),
            accepting: self.accepting.clone().unwrap_or_default(),
            transitions,
        })
    }

    pub fn from_system(sys: &PointedSystem) -> SystemFile {
        let letters = sys.alphabet();
        let mut transitions = IndexMap::new();
        for x in sys.state_ids() {
            let mut by_letter = IndexMap::new();
            for a in 0..letters.len() {
                let value = match sys.dynamics() {
                    Dynamics::Dfa { next, .. } => Value::from(sys.name(next[x.0][a])),
                    Dynamics::Mealy { step } => {
                        let (o, y) = step[x.0][a];
                        let outs = sys.outputs().expect("mealy outputs");
                        Value::from(vec![outs.name(o), sys.name(y)])
                    }
                    Dynamics::Lts { succ } => {
                        if succ[x.0][a].is_empty() {
                            continue;
                        }
                        Value::from(succ[x.0][a].iter().map(|&y| sys.name(y)).collect::<Vec<_>>())
                    }
                };
                by_letter.insert(letters.name(a).to_string(), value);
            }
            transitions.insert(sys.name(x).to_string(), by_letter);
        }
        SystemFile {
            kind: sys.kind().to_string(),
            alphabet: letters.names().to_vec(),
            outputs: sys.outputs().map(|o| o.names().to_vec()).unwrap_or_default(),
            states: sys.state_names().to_vec(),
            initial: sys.name(sys.initial()).to_string(),
            accepting: match sys.dynamics() {
                Dynamics::Dfa { accepting, .. } => Some(
                    sys.state_ids()
                        .filter(|x| accepting[x.0])
                        .map(|x| sys.name(x).to_string())
                        .collect(),
                ),
                _ => None,
            },
            transitions,
        }
    }
}

/// Parses and validates a system file.
pub fn parse_system(text: &str) -> Result<PointedSystem, FormatError> {
    let file: SystemFile = serde_json::from_str(text)?;
    Ok(file.to_draft()?.build()?)
}

pub fn export_system(sys: &PointedSystem) -> String {
    let mut text = serde_json::to_string_pretty(&SystemFile::from_system(sys))
        .expect("system files serialize");
    text.push('\n');
    text
}

fn dot_id(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering: one node per state, an arrow from an invisible node
/// into the initial state, accepting DFA states double-circled, edges
/// labelled by letter (`letter/output` for Mealy machines).
pub fn export_dot(sys: &PointedSystem) -> String {
    let mut out = String::new();
    let letters = sys.alphabet();
    writeln!(out, "digraph {} {{", sys.kind()).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  __start [shape=point];").unwrap();
    for x in sys.state_ids() {
        let shape = match sys.is_accepting(x) {
            Some(true) => "doublecircle",
            _ => "circle",
        };
        writeln!(out, "  {} [shape={shape}];", dot_id(sys.name(x))).unwrap();
    }
    writeln!(out, "  __start -> {};", dot_id(sys.name(sys.initial()))).unwrap();
    for x in sys.state_ids() {
        for a in 0..letters.len() {
            for &y in sys.targets(x, a) {
                let label = match sys.output(x, a) {
                    Some(o) => format!("{}/{}", letters.name(a), sys.outputs().expect("mealy").name(o)),
                    None => letters.name(a).to_string(),
                };
                writeln!(
                    out,
                    "  {} -> {} [label={}];",
                    dot_id(sys.name(x)),
                    dot_id(sys.name(y)),
                    dot_id(&label)
                )
                .unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Edges as `(source, letter, target)` names, in DOT order.
pub fn edge_list(sys: &PointedSystem) -> Vec<(String, String, String)> {
    let mut edges = Vec::new();
    for x in sys.state_ids() {
        for a in 0..sys.alphabet().len() {
            for &y in sys.targets(x, a) {
                edges.push((
                    sys.name(x).to_string(),
                    sys.alphabet().name(a).to_string(),
                    sys.name(y).to_string(),
                ));
            }
        }
    }
    edges
}
