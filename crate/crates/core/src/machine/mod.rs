//! The machine model: tapes over carrier sets, statements, subroutine
//! tables, and the small-step engine.

mod engine;
mod trace;
mod value;


use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use engine::{
    enumerate_outcomes, initial_configuration, run, run_traced, step, BlockReason, Cell,
    Configuration, EnumerateError, MachineError, Outcomes, RunOutcome, Step, StepInfo, Tape, Tri,
};
pub use trace::{ChangedCell, TraceRecord};
pub use value::{CarrierId, Kind, Value};

use crate::names::Word;

pub type LabelId = usize;
pub type TapeIndex = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Statement {
    Right {
        tape: TapeIndex,
        next: LabelId,
    },
    Left {
        tape: TapeIndex,
        next: LabelId,
    },
    Write {
        tape: TapeIndex,
        symbol: char,
        next: LabelId,
    },
    IfSymbol {
        tape: TapeIndex,
        symbol: char,
        then: LabelId,
        otherwise: LabelId,
    },
    Assign {
        tape: TapeIndex,
        function: String,
        args: Vec<TapeIndex>,
        next: LabelId,
    },
    IfTest {
        function: String,
        args: Vec<TapeIndex>,
        then: LabelId,
        otherwise: LabelId,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatementKind {
    Right,
    Left,
    Write,
    IfSymbol,
    Assign,
    IfTest,
}

impl Statement {
    pub fn kind(&self) -> StatementKind {
        match self {
            Statement::Right { .. } => StatementKind::Right,
            Statement::Left { .. } => StatementKind::Left,
            Statement::Write { .. } => StatementKind::Write,
            Statement::IfSymbol { .. } => StatementKind::IfSymbol,
            Statement::Assign { .. } => StatementKind::Assign,
            Statement::IfTest { .. } => StatementKind::IfTest,
        }
    }

    /// Labels this statement can continue to.
    pub fn successors(&self) -> Vec<LabelId> {
        match self {
            Statement::Right { next, .. }
            | Statement::Left { next, .. }
            | Statement::Write { next, .. }
            | Statement::Assign { next, .. } => vec![*next],
            Statement::IfSymbol {
                then, otherwise, ..
            }
            | Statement::IfTest {
                then, otherwise, ..
            } => {
                vec![*then, *otherwise]
            }
        }
    }

    pub fn function(&self) -> Option<&str> {
        match self {
            Statement::Assign { function, .. } | Statement::IfTest { function, .. } => {
                Some(function)
            }
            _ => None,
        }
    }

    pub fn tapes(&self) -> Vec<TapeIndex> {
        match self {
            Statement::Right { tape, .. }
            | Statement::Left { tape, .. }
            | Statement::Write { tape, .. }
            | Statement::IfSymbol { tape, .. } => vec![*tape],
            Statement::Assign { tape, args, .. } => {
                std::iter::once(*tape).chain(args.iter().copied()).collect()
            }
            Statement::IfTest { args, .. } => args.clone(),
        }
    }
}

/// Carrier ids of a subroutine's arguments and result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub inputs: Vec<CarrierId>,
    pub output: CarrierId,
}

impl Signature {
    pub fn new(inputs: &[&str], output: &str) -> Self {
        Self {
            inputs: inputs.iter().map(|s| CarrierId::new(*s)).collect(),
            output: CarrierId::new(output),
        }
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }
}

/// `f: X_{i₁} × … × X_{iₙ} ⇉ X_i`. An empty result means the arguments are
/// outside the domain.
pub trait MultiFunction: Send + Sync {
    fn name(&self) -> &str;
    fn signature(&self) -> &Signature;
    /// One element of `f(args)` selected by `token`, or `None` if `f(args) = ∅`.
    fn choose(&self, args: &[Value], token: u64) -> Option<Value>;
    /// All of `f(args)` when the set is finite and known.
    fn enumerate(&self, _args: &[Value]) -> Option<Vec<Value>> {
        None
    }
}

/// A single-valued partial test with results in `{"0", "1"}`.
pub trait TestFunction: Send + Sync {
    fn name(&self) -> &str;
    fn signature(&self) -> &Signature;
    fn evaluate(&self, args: &[Value]) -> Option<Word>;
}

type SingleFn = dyn Fn(&[Value]) -> Option<Value> + Send + Sync;
type FiniteFn = dyn Fn(&[Value]) -> Vec<Value> + Send + Sync;
type SamplerFn = dyn Fn(&[Value], u64) -> Option<Value> + Send + Sync;

#[derive(Clone)]
enum MultiImpl {
    Single(Arc<SingleFn>),
    Finite(Arc<FiniteFn>),
    Sampler(Arc<SamplerFn>),
}

/// A closure-backed [`MultiFunction`].
#[derive(Clone)]
pub struct FnMulti {
    name: String,
    signature: Signature,
    imp: MultiImpl,
}

impl FnMulti {
    /// A partial single-valued function.
    pub fn single(
        name: impl Into<String>,
        signature: Signature,
        f: impl Fn(&[Value]) -> Option<Value> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            signature,
            imp: MultiImpl::Single(Arc::new(f)),
        }
    }

    /// A multi-function with finite value sets; token `t` picks element `t mod |f(args)|`.
    pub fn finite(
        name: impl Into<String>,
        signature: Signature,
        f: impl Fn(&[Value]) -> Vec<Value> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            signature,
            imp: MultiImpl::Finite(Arc::new(f)),
        }
    }

    /// A multi-function that can only be sampled.
    pub fn sampler(
        name: impl Into<String>,
        signature: Signature,
        f: impl Fn(&[Value], u64) -> Option<Value> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            signature,
            imp: MultiImpl::Sampler(Arc::new(f)),
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl MultiFunction for FnMulti {
    fn name(&self) -> &str {
        &self.name
    }

    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn choose(&self, args: &[Value], token: u64) -> Option<Value> {
        match &self.imp {
            MultiImpl::Single(f) => f(args),
            MultiImpl::Finite(f) => {
                let values = f(args);
                if values.is_empty() {
                    None
                } else {
                    Some(values[(token % values.len() as u64) as usize].clone())
                }
            }
            MultiImpl::Sampler(f) => f(args, token),
        }
    }

    fn enumerate(&self, args: &[Value]) -> Option<Vec<Value>> {
        match &self.imp {
            MultiImpl::Single(f) => Some(f(args).into_iter().collect()),
            MultiImpl::Finite(f) => Some(f(args)),
            MultiImpl::Sampler(_) => None,
        }
    }
}

type TestFn = dyn Fn(&[Value]) -> Option<Word> + Send + Sync;

/// A closure-backed [`TestFunction`].
#[derive(Clone)]
pub struct FnTest {
    name: String,
    signature: Signature,
    f: Arc<TestFn>,
}

impl FnTest {
    pub fn new(
        name: impl Into<String>,
        inputs: &[&str],
        f: impl Fn(&[Value]) -> Option<Word> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            signature: Signature::new(inputs, "word"),
            f: Arc::new(f),
        }
    }

    /// A test from a boolean predicate: `true ↦ "0"` (then-branch), `false ↦ "1"`.
    pub fn predicate(
        name: impl Into<String>,
        inputs: &[&str],
        f: impl Fn(&[Value]) -> Option<bool> + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, inputs, move |args| {
            f(args).map(|b| Word::from(if b { "0" } else { "1" }))
        })
    }
}

impl TestFunction for FnTest {
    fn name(&self) -> &str {
        &self.name
    }

    fn signature(&self) -> &Signature {
        &self.signature
    }

    fn evaluate(&self, args: &[Value]) -> Option<Word> {
        (self.f)(args)
    }
}

#[derive(Clone)]
pub enum Subroutine {
    Assign(Arc<dyn MultiFunction>),
    Test(Arc<dyn TestFunction>),
}

impl Subroutine {
    pub fn assign(f: impl MultiFunction + 'static) -> Self {
        Subroutine::Assign(Arc::new(f))
    }

    pub fn test(f: impl TestFunction + 'static) -> Self {
        Subroutine::Test(Arc::new(f))
    }

    pub fn name(&self) -> &str {
        match self {
            Subroutine::Assign(f) => f.name(),
            Subroutine::Test(f) => f.name(),
        }
    }

    pub fn signature(&self) -> &Signature {
        match self {
            Subroutine::Assign(f) => f.signature(),
            Subroutine::Test(f) => f.signature(),
        }
    }

    pub fn is_test(&self) -> bool {
        matches!(self, Subroutine::Test(_))
    }
}

impl fmt::Debug for Subroutine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.is_test() { "test" } else { "assign" };
        write!(f, "{kind} {}{:?}", self.name(), self.signature())
    }
}

impl PartialEq for Subroutine {
    fn eq(&self, other: &Self) -> bool {
        self.is_test() == other.is_test()
            && self.name() == other.name()
            && self.signature() == other.signature()
    }
}

/// A generalized Turing machine. Label 0 is the initial label; tape 0 is the
/// output tape and tapes `1..=inputs` are the input tapes.
#[derive(Clone, Debug, PartialEq)]
pub struct Machine {
    pub name: String,
    pub labels: Vec<String>,
    pub final_label: LabelId,
    /// Work alphabet Γ, including the blank.
    pub gamma: Vec<char>,
    pub blank: char,
    pub inputs: usize,
    /// `X_0 … X_L`.
    pub carriers: Vec<CarrierId>,
    /// Indexed by label; `None` exactly at the final label.
    pub statements: Vec<Option<Statement>>,
    /// Subroutine table, keyed by the name statements use.
    pub subroutines: BTreeMap<String, Subroutine>,
}

impl Machine {
    pub const INITIAL: LabelId = 0;

    /// Highest tape index `L`.
    pub fn top_tape(&self) -> TapeIndex {
        self.carriers.len().saturating_sub(1)
    }

    pub fn tape_count(&self) -> usize {
        self.carriers.len()
    }

    pub fn label_id(&self, name: &str) -> Option<LabelId> {
        self.labels.iter().position(|l| l == name)
    }

    pub fn label_name(&self, id: LabelId) -> &str {
        &self.labels[id]
    }

    pub fn statement(&self, label: LabelId) -> Option<&Statement> {
        self.statements.get(label).and_then(Option::as_ref)
    }

    /// Labels whose statement calls `function`.
    pub fn labels_using(&self, function: &str) -> Vec<LabelId> {
        (0..self.labels.len())
            .filter(|l| self.statement(*l).and_then(Statement::function) == Some(function))
            .collect()
    }

    pub fn has_assignments(&self) -> bool {
        self.statements
            .iter()
            .flatten()
            .any(|s| s.kind() == StatementKind::Assign)
    }
}

/// The choice-token sequence for a seed: the seed itself, followed by the
/// outputs of ChaCha8 seeded with `seed` through `seed_from_u64`.
pub fn seeded_tokens(seed: u64) -> impl Iterator<Item = u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    std::iter::once(seed).chain(std::iter::repeat_with(move || rng.next_u64()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_multifunction_selects_by_token() {
        let coin = FnMulti::finite("coin", Signature::new(&[], "word"), |_| {
            vec![Value::Word(Word::from("0")), Value::Word(Word::from("1"))]
        });
        assert_eq!(coin.choose(&[], 0), Some(Value::Word(Word::from("0"))));
        assert_eq!(coin.choose(&[], 1), Some(Value::Word(Word::from("1"))));
        assert_eq!(coin.choose(&[], 7), Some(Value::Word(Word::from("1"))));
        assert_eq!(coin.enumerate(&[]).unwrap().len(), 2);
        for t in 0..10 {
            let v = coin.choose(&[], t).unwrap();
            assert!(coin.enumerate(&[]).unwrap().contains(&v));
        }
    }

    #[test]
    fn seeded_tokens_are_reproducible() {
        let a: Vec<u64> = seeded_tokens(42).take(5).collect();
        let b: Vec<u64> = seeded_tokens(42).take(5).collect();
        assert_eq!(a, b);
        assert_eq!(a[0], 42);
        assert_ne!(seeded_tokens(1).nth(1), seeded_tokens(2).nth(1));
    }
}
