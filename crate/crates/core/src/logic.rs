//! Tests (words and modal formulas), closed test suites, and their semantics
//! on pointed systems.
//!
//! Words are tests for DFAs (acceptance after the run) and Mealy machines
//! (output of the last step). Modal formulas with `<a>` diamonds are tests
//! for LTSs. A [`TestSuite`] is always closed: suffix-closed for words,
//! closed under immediate subformulas for formulas.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::system::{Kind, PointedSystem, StateId, Symbols, SystemError};

/// A word over letter indices of an [`Alphabet`](crate::system::Alphabet).
pub type Word = Vec<usize>;

#[derive(Debug, Error)]
pub enum LogicError {
    #[error("letter index {0} is outside the alphabet")]
    LetterOutOfRange(usize),
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    #[error("mealy tests must be non-empty words")]
    EmptyMealyWord,
    #[error("{test} test cannot be evaluated on a {kind} system")]
    KindMismatch { test: &'static str, kind: Kind },
    #[error("cannot parse formula at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    System(#[from] SystemError),
}

/// Modal formulas over the actions of an alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bottom,
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Diamond(usize, Box<Formula>),
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn diamond(letter: usize, f: Formula) -> Formula {
        Formula::Diamond(letter, Box::new(f))
    }

    /// Right-nested conjunction; `Top` for an empty list.
    pub fn conjunction(mut parts: Vec<Formula>) -> Formula {
        let Some(mut acc) = parts.pop() else {
            return Formula::Top;
        };
        while let Some(f) = parts.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom => 1,
            Formula::Not(f) | Formula::Diamond(_, f) => 1 + f.size(),
            Formula::Or(l, r) | Formula::And(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn immediate_subformulas(&self) -> Vec<&Formula> {
        match self {
            Formula::Top | Formula::Bottom => vec![],
            Formula::Not(f) | Formula::Diamond(_, f) => vec![f],
            Formula::Or(l, r) | Formula::And(l, r) => vec![l, r],
        }
    }

    fn tag(&self) -> u8 {
        match self {
            Formula::Top => 0,
            Formula::Bottom => 1,
            Formula::Not(_) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Diamond(..) => 5,
        }
    }

    fn structural_cmp(&self, other: &Formula) -> Ordering {
        use Formula::*;
        match (self, other) {
            (Not(a), Not(b)) => a.structural_cmp(b),
            (Or(a1, a2), Or(b1, b2)) | (And(a1, a2), And(b1, b2)) => {
                a1.structural_cmp(b1).then_with(|| a2.structural_cmp(b2))
            }
            (Diamond(x, a), Diamond(y, b)) => x.cmp(y).then_with(|| a.structural_cmp(b)),
            _ => self.tag().cmp(&other.tag()),
        }
    }

    pub fn max_letter(&self) -> Option<usize> {
        match self {
            Formula::Top | Formula::Bottom => None,
            Formula::Not(f) => f.max_letter(),
            Formula::Diamond(a, f) => Some(f.max_letter().map_or(*a, |m| m.max(*a))),
            Formula::Or(l, r) | Formula::And(l, r) => l.max_letter().max(r.max_letter()),
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a Symbols) -> FormulaDisplay<'a> {
        FormulaDisplay {
            formula: self,
            alphabet,
        }
    }

    /// Parses `T`, `F`, `~p`, `(p|q)`, `(p&q)` and `<a>p`.
    pub fn parse(text: &str, alphabet: &Symbols) -> Result<Formula, LogicError> {
        let mut parser = FormulaParser {
            src: text,
            pos: 0,
            alphabet,
        };
        let f = parser.formula()?;
        parser.skip_ws();
        if parser.pos != text.len() {
            return Err(parser.error("trailing input"));
        }
        Ok(f)
    }
}

/// Canonical order: by size, then structurally.
impl Ord for Formula {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.structural_cmp(other))
    }
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    alphabet: &'a Symbols,
}

impl<'a> FormulaDisplay<'a> {
    fn child(&self, g: &'a Formula) -> FormulaDisplay<'a> {
        FormulaDisplay {
            formula: g,
            alphabet: self.alphabet,
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |g| self.child(g);
        match self.formula {
            Formula::Top => f.write_str("T"),
            Formula::Bottom => f.write_str("F"),
            Formula::Not(g) => write!(f, "~{}", sub(g)),
            Formula::Or(l, r) => write!(f, "({}|{})", sub(l), sub(r)),
            Formula::And(l, r) => write!(f, "({}&{})", sub(l), sub(r)),
            Formula::Diamond(a, g) => write!(f, "<{}>{}", self.alphabet.name(*a), sub(g)),
        }
    }
}

struct FormulaParser<'a> {
    src: &'a str,
    pos: usize,
    alphabet: &'a Symbols,
}

impl FormulaParser<'_> {
    fn error(&self, msg: &str) -> LogicError {
        LogicError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, want: char) -> Result<(), LogicError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += c.len_utf8();
                Ok(())
            }
            _ => Err(self.error(&format!("expected '{want}'"))),
        }
    }

    fn formula(&mut self) -> Result<Formula, LogicError> {
        match self.peek() {
            Some('T') => {
                self.pos += 1;
                Ok(Formula::Top)
            }
            Some('F') => {
                self.pos += 1;
                Ok(Formula::Bottom)
            }
            Some('~') => {
                self.pos += 1;
                Ok(Formula::not(self.formula()?))
            }
            Some('<') => {
                self.pos += 1;
                let end = self.src[self.pos..]
                    .find('>')
                    .ok_or_else(|| self.error("unterminated action"))?;
                let name = self.src[self.pos..self.pos + end].trim();
                let letter = self
                    .alphabet
                    .index_of(name)
                    .ok_or_else(|| LogicError::UnknownLetter(name.to_string()))?;
                self.pos += end + 1;
                Ok(Formula::diamond(letter, self.formula()?))
            }
            Some('(') => {
                self.pos += 1;
                let left = self.formula()?;
                let op = self.peek();
                match op {
                    Some('|') | Some('&') => self.pos += 1,
                    _ => return Err(self.error("expected '|' or '&'")),
                }
                let right = self.formula()?;
                self.expect(')')?;
                Ok(if op == Some('|') {
                    Formula::or(left, right)
                } else {
                    Formula::and(left, right)
                })
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Renders a word; `""` for the empty word. Letters are concatenated when
/// all are single characters and joined with `.` otherwise.
pub fn display_word(word: &[usize], alphabet: &Symbols) -> String {
    if word.is_empty() {
        return "\"\"".to_string();
    }
    let sep = if alphabet.is_single_char() { "" } else { "." };
    word.iter()
        .map(|&a| alphabet.name(a))
        .collect::<Vec<_>>()
        .join(sep)
}

/// Parses a word. Surrounding double quotes are stripped; text containing `.`
/// or whitespace is split on those, anything else is matched greedily
/// against the alphabet.
pub fn parse_word(text: &str, alphabet: &Symbols) -> Result<Word, LogicError> {
    let text = text.trim();
    let text = text
        .strip_prefix('"')
        .and_then(|t| t.strip_suffix('"'))
        .unwrap_or(text);
    if text.contains('.') || text.contains(char::is_whitespace) {
        return text
            .split(|c: char| c == '.' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                alphabet
                    .index_of(t)
                    .ok_or_else(|| LogicError::UnknownLetter(t.to_string()))
            })
            .collect();
    }
    let mut word = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        let best = alphabet
            .names()
            .iter()
            .enumerate()
            .filter(|(_, n)| rest.starts_with(n.as_str()))
            .max_by_key(|(_, n)| n.len());
        match best {
            Some((i, n)) => {
                word.push(i);
                rest = &rest[n.len()..];
            }
            None => return Err(LogicError::UnknownLetter(rest.to_string())),
        }
    }
    Ok(word)
}

/// A single test: a word (DFA, Mealy) or a modal formula (LTS).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Test {
    Word(Word),
    Formula(Formula),
}

/// Words in shortlex order, formulas by size then structure.
impl Ord for Test {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Test::Word(a), Test::Word(b)) => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
            (Test::Formula(a), Test::Formula(b)) => a.cmp(b),
            (Test::Word(_), Test::Formula(_)) => Ordering::Less,
            (Test::Formula(_), Test::Word(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for Test {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Test {
    pub fn word(letters: impl IntoIterator<Item = usize>) -> Test {
        Test::Word(letters.into_iter().collect())
    }

    fn variant(&self) -> &'static str {
        match self {
            Test::Word(_) => "word",
            Test::Formula(_) => "formula",
        }
    }

    /// Checks that the test belongs to the logic of `kind` over an alphabet
    /// of `letters` symbols.
    pub fn check(&self, kind: Kind, letters: usize) -> Result<(), LogicError> {
        match (self, kind) {
            (Test::Word(w), Kind::Dfa | Kind::Mealy) => {
                if kind == Kind::Mealy && w.is_empty() {
                    return Err(LogicError::EmptyMealyWord);
                }
                match w.iter().find(|&&a| a >= letters) {
                    Some(&a) => Err(LogicError::LetterOutOfRange(a)),
                    None => Ok(()),
                }
            }
            (Test::Formula(f), Kind::Lts) => match f.max_letter() {
                Some(a) if a >= letters => Err(LogicError::LetterOutOfRange(a)),
                _ => Ok(()),
            },
            _ => Err(LogicError::KindMismatch {
                test: self.variant(),
                kind,
            }),
        }
    }

    pub fn display<'a>(&'a self, alphabet: &'a Symbols) -> TestDisplay<'a> {
        TestDisplay {
            test: self,
            alphabet,
        }
    }

    pub fn parse(text: &str, kind: Kind, alphabet: &Symbols) -> Result<Test, LogicError> {
        let test = match kind {
            Kind::Dfa | Kind::Mealy => Test::Word(parse_word(text, alphabet)?),
            Kind::Lts => Test::Formula(Formula::parse(text, alphabet)?),
        };
        test.check(kind, alphabet.len())?;
        Ok(test)
    }

    pub fn size(&self) -> usize {
        match self {
            Test::Word(w) => w.len(),
            Test::Formula(f) => f.size(),
        }
    }
}

pub struct TestDisplay<'a> {
    test: &'a Test,
    alphabet: &'a Symbols,
}

impl fmt::Display for TestDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.test {
            Test::Word(w) => f.write_str(&display_word(w, self.alphabet)),
            Test::Formula(g) => write!(f, "{}", g.display(self.alphabet)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TruthValue {
    Bool(bool),
    /// Index into the output alphabet.
    Output(usize),
}

impl TruthValue {
    pub fn render(&self, outputs: Option<&Symbols>) -> String {
        match (self, outputs) {
            (TruthValue::Bool(b), _) => b.to_string(),
            (TruthValue::Output(o), Some(outs)) => outs.name(*o).to_string(),
            (TruthValue::Output(o), None) => o.to_string(),
        }
    }
}

/// A finite set of tests of one logic, closed under the logic's
/// decomposition. Iteration follows the canonical test order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSuite {
    kind: Kind,
    tests: BTreeSet<Test>,
}

impl TestSuite {
    pub fn empty(kind: Kind) -> Self {
        TestSuite {
            kind,
            tests: BTreeSet::new(),
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.tests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tests.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Test> {
        self.tests.iter()
    }

    pub fn contains(&self, t: &Test) -> bool {
        self.tests.contains(t)
    }

    pub fn is_subset(&self, other: &TestSuite) -> bool {
        self.tests.is_subset(&other.tests)
    }

    /// Adds `t` together with everything needed to stay closed. Returns
    /// whether the suite grew.
    pub fn insert_closed(&mut self, t: Test, letters: usize) -> Result<bool, LogicError> {
        t.check(self.kind, letters)?;
        let before = self.tests.len();
        let mut pending = vec![t];
        while let Some(t) = pending.pop() {
            match &t {
                Test::Word(w) => {
                    for start in 0..=w.len() {
                        let suffix = &w[start..];
                        if self.kind == Kind::Mealy && suffix.is_empty() {
                            continue;
                        }
                        self.tests.insert(Test::Word(suffix.to_vec()));
                    }
                }
                Test::Formula(f) => {
                    if self.tests.insert(t.clone()) {
                        pending.extend(
                            f.immediate_subformulas()
                                .into_iter()
                                .map(|g| Test::Formula(g.clone())),
                        );
                    }
                }
            }
        }
        Ok(self.tests.len() > before)
    }

    pub fn union(&self, other: &TestSuite) -> TestSuite {
        TestSuite {
            kind: self.kind,
            tests: self.tests.union(&other.tests).cloned().collect(),
        }
    }

    /// Whether the suite really is closed under suffixes / subformulas.
    pub fn is_closed(&self) -> bool {
        self.tests.iter().all(|t| match t {
            Test::Word(w) => (1..=w.len()).all(|start| {
                let suffix = &w[start..];
                (self.kind == Kind::Mealy && suffix.is_empty())
                    || self.tests.contains(&Test::Word(suffix.to_vec()))
            }),
            Test::Formula(f) => f
                .immediate_subformulas()
                .into_iter()
                .all(|g| self.tests.contains(&Test::Formula(g.clone()))),
        })
    }

    pub fn render(&self, alphabet: &Symbols) -> Vec<String> {
        self.tests
            .iter()
            .map(|t| t.display(alphabet).to_string())
            .collect()
    }
}

/// Smallest suffix-closed superset of `words`. The empty word is left out
/// for Mealy suites.
pub fn suffix_closure<I>(kind: Kind, letters: usize, words: I) -> Result<TestSuite, LogicError>
where
    I: IntoIterator<Item = Word>,
{
    let mut suite = TestSuite::empty(kind);
    for w in words {
        if kind == Kind::Mealy && w.is_empty() {
            continue;
        }
        suite.insert_closed(Test::Word(w), letters)?;
    }
    Ok(suite)
}

/// Smallest subformula-closed superset of `formulas`.
pub fn subformula_closure<I>(letters: usize, formulas: I) -> Result<TestSuite, LogicError>
where
    I: IntoIterator<Item = Formula>,
{
    let mut suite = TestSuite::empty(Kind::Lts);
    for f in formulas {
        suite.insert_closed(Test::Formula(f), letters)?;
    }
    Ok(suite)
}

/// Closure of a single test in the logic of `kind`.
pub fn closure_of(kind: Kind, letters: usize, t: &Test) -> Result<TestSuite, LogicError> {
    let mut suite = TestSuite::empty(kind);
    suite.insert_closed(t.clone(), letters)?;
    Ok(suite)
}

/// Values of the tests of a suite at one state, in suite order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Row(pub Vec<TruthValue>);

impl Row {
    pub fn render(&self, outputs: Option<&Symbols>) -> String {
        let cells: Vec<String> = self
            .0
            .iter()
            .map(|v| match v {
                TruthValue::Bool(b) => (if *b { "1" } else { "0" }).to_string(),
                other => other.render(outputs),
            })
            .collect();
        format!("[{}]", cells.join(","))
    }
}

/// Value of `t` at state `x`.
pub fn eval_test(sys: &PointedSystem, x: StateId, t: &Test) -> Result<TruthValue, LogicError> {
    if !sys.contains(x) {
        return Err(SystemError::UnknownState(x).into());
    }
    t.check(sys.kind(), sys.alphabet().len())?;
    Ok(match t {
        Test::Word(w) => match sys.kind() {
            Kind::Dfa => {
                let end = w
                    .iter()
                    .fold(x, |y, &a| sys.next(y, a).expect("deterministic"));
                TruthValue::Bool(sys.is_accepting(end).expect("dfa"))
            }
            Kind::Mealy => {
                let (&last, prefix) = w.split_last().expect("checked non-empty");
                let before = prefix
                    .iter()
                    .fold(x, |y, &a| sys.next(y, a).expect("deterministic"));
                TruthValue::Output(sys.output(before, last).expect("mealy"))
            }
            Kind::Lts => unreachable!("checked"),
        },
        Test::Formula(f) => TruthValue::Bool(holds(sys, x, f)),
    })
}

/// Hennessy-Milner satisfaction.
pub fn holds(sys: &PointedSystem, x: StateId, f: &Formula) -> bool {
    match f {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Not(g) => !holds(sys, x, g),
        Formula::Or(l, r) => holds(sys, x, l) || holds(sys, x, r),
        Formula::And(l, r) => holds(sys, x, l) && holds(sys, x, r),
        Formula::Diamond(a, g) => sys.targets(x, *a).iter().any(|&y| holds(sys, y, g)),
    }
}

/// The row of `x` over `suite`.
pub fn theory_row(sys: &PointedSystem, x: StateId, suite: &TestSuite) -> Result<Row, LogicError> {
    suite
        .iter()
        .map(|t| eval_test(sys, x, t))
        .collect::<Result<_, _>>()
        .map(Row)
}
