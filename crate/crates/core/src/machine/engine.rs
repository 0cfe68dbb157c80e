use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::trace::{ChangedCell, TraceRecord};
use super::{
    CarrierId, Kind, LabelId, Machine, MultiFunction, Statement, StatementKind, Subroutine,
    TapeIndex, Value,
};

/// Content of one tape cell: a work symbol or a carrier element.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Symbol(char),
    Value(Value),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Symbol(c) => format!("'{c}'"),
            Cell::Value(v) => v.render(),
        }
    }

    pub fn as_value(&self) -> Option<&Value> {
        match self {
            Cell::Value(v) => Some(v),
            Cell::Symbol(_) => None,
        }
    }
}

/// A bi-infinite tape stored sparsely; absent cells hold the blank.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Tape {
    cells: BTreeMap<i64, Cell>,
    pub head: i64,
}

impl Tape {
    /// `None` means the cell holds the blank.
    pub fn get(&self, index: i64) -> Option<&Cell> {
        self.cells.get(&index)
    }

    pub fn stored(&self) -> impl Iterator<Item = (&i64, &Cell)> {
        self.cells.iter()
    }

    fn write(&mut self, index: i64, cell: Cell, blank: char) {
        if cell == Cell::Symbol(blank) {
            self.cells.remove(&index);
        } else {
            self.cells.insert(index, cell);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub label: LabelId,
    pub tapes: Vec<Tape>,
    blank: char,
}

impl Configuration {
    pub fn blank(&self) -> char {
        self.blank
    }

    pub fn cell(&self, tape: TapeIndex, index: i64) -> Cell {
        self.tapes[tape]
            .get(index)
            .cloned()
            .unwrap_or(Cell::Symbol(self.blank))
    }

    /// The cell under the head of `tape`.
    pub fn scanned(&self, tape: TapeIndex) -> Cell {
        self.cell(tape, self.tapes[tape].head)
    }

    pub fn heads(&self) -> Vec<i64> {
        self.tapes.iter().map(|t| t.head).collect()
    }

    /// `α₀(0)`.
    pub fn output_cell(&self) -> Cell {
        self.cell(0, 0)
    }

    fn write_scanned(&mut self, tape: TapeIndex, cell: Cell) -> i64 {
        let index = self.tapes[tape].head;
        let blank = self.blank;
        self.tapes[tape].write(index, cell, blank);
        index
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("machine takes {expected} inputs, got {found}")]
    InputArity { expected: usize, found: usize },
    #[error("input tape {tape} expects carrier `{expected}`, got a {found:?} value")]
    InputKind {
        tape: TapeIndex,
        expected: CarrierId,
        found: Kind,
    },
}

/// Why a configuration has no successor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum BlockReason {
    EmptyDomain {
        label: String,
        function: String,
    },
    TestUndefined {
        label: String,
        function: String,
    },
    TestOutOfRange {
        label: String,
        function: String,
        value: String,
    },
    ArgumentKind {
        label: String,
        tape: TapeIndex,
        expected: String,
    },
    ResultKind {
        label: String,
        function: String,
        tape: TapeIndex,
    },
    MissingStatement {
        label: String,
    },
    UnknownFunction {
        label: String,
        function: String,
    },
    WrongSubroutineKind {
        label: String,
        function: String,
    },
}

impl fmt::Display for BlockReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockReason::EmptyDomain { label, function } => {
                write!(
                    f,
                    "at {label}: `{function}` has no value for these arguments"
                )
            }
            BlockReason::TestUndefined { label, function } => {
                write!(f, "at {label}: test `{function}` is undefined")
            }
            BlockReason::TestOutOfRange {
                label,
                function,
                value,
            } => {
                write!(
                    f,
                    "at {label}: test `{function}` returned {value}, not 0 or 1"
                )
            }
            BlockReason::ArgumentKind {
                label,
                tape,
                expected,
            } => {
                write!(
                    f,
                    "at {label}: tape {tape} does not hold a `{expected}` value"
                )
            }
            BlockReason::ResultKind {
                label,
                function,
                tape,
            } => {
                write!(
                    f,
                    "at {label}: `{function}` produced a value outside the carrier of tape {tape}"
                )
            }
            BlockReason::MissingStatement { label } => write!(f, "no statement for label {label}"),
            BlockReason::UnknownFunction { label, function } => {
                write!(f, "at {label}: unknown subroutine `{function}`")
            }
            BlockReason::WrongSubroutineKind { label, function } => {
                write!(
                    f,
                    "at {label}: `{function}` is used as the wrong kind of subroutine"
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepInfo {
    pub kind: StatementKind,
    pub tape: Option<TapeIndex>,
    pub changed: Option<(TapeIndex, i64)>,
    pub token: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Next(Configuration, StepInfo),
    Final,
    Blocked(BlockReason),
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunOutcome {
    Accepted {
        output: Value,
        steps: usize,
    },
    /// Reached the final label but `α₀(0)` is not an element of `X₀`.
    RejectedAtFinal {
        steps: usize,
    },
    Blocked {
        reason: BlockReason,
        steps: usize,
    },
    BudgetExceeded {
        steps: usize,
    },
}

impl RunOutcome {
    pub fn output(&self) -> Option<&Value> {
        match self {
            RunOutcome::Accepted { output, .. } => Some(output),
            _ => None,
        }
    }

    pub fn steps(&self) -> usize {
        match self {
            RunOutcome::Accepted { steps, .. }
            | RunOutcome::RejectedAtFinal { steps }
            | RunOutcome::Blocked { steps, .. }
            | RunOutcome::BudgetExceeded { steps } => *steps,
        }
    }
}

/// `IC(x₁,…,x_k)`: label `l₀`, all heads at 0, input `i` in cell 0 of tape `i`.
pub fn initial_configuration(m: &Machine, inputs: &[Value]) -> Result<Configuration, MachineError> {
    if inputs.len() != m.inputs {
        return Err(MachineError::InputArity {
            expected: m.inputs,
            found: inputs.len(),
        });
    }
    let mut tapes = vec![Tape::default(); m.tape_count()];
    for (i, x) in inputs.iter().enumerate() {
        let tape = i + 1;
        if !x.belongs_to(&m.carriers[tape]) {
            return Err(MachineError::InputKind {
                tape,
                expected: m.carriers[tape].clone(),
                found: x.kind(),
            });
        }
        tapes[tape].write(0, Cell::Value(x.clone()), m.blank);
    }
    Ok(Configuration {
        label: Machine::INITIAL,
        tapes,
        blank: m.blank,
    })
}

fn gather_args(
    m: &Machine,
    c: &Configuration,
    label: &str,
    inputs: &[CarrierId],
    args: &[TapeIndex],
) -> Result<Vec<Value>, BlockReason> {
    args.iter()
        .enumerate()
        .map(|(j, &tape)| {
            let expected = inputs.get(j).cloned().unwrap_or_else(CarrierId::any);
            match c.scanned(tape) {
                Cell::Value(v) if v.belongs_to(&m.carriers[tape]) && v.belongs_to(&expected) => {
                    Ok(v)
                }
                _ => Err(BlockReason::ArgumentKind {
                    label: label.to_string(),
                    tape,
                    expected: m.carriers[tape].to_string(),
                }),
            }
        })
        .collect()
}

fn assign_target<'m>(
    m: &'m Machine,
    c: &Configuration,
    function: &str,
    args: &[TapeIndex],
) -> Result<(&'m Arc<dyn MultiFunction>, Vec<Value>), BlockReason> {
    let label = m.label_name(c.label);
    match m.subroutines.get(function) {
        Some(Subroutine::Assign(f)) => {
            let values = gather_args(m, c, label, &f.signature().inputs, args)?;
            Ok((f, values))
        }
        Some(Subroutine::Test(_)) => Err(BlockReason::WrongSubroutineKind {
            label: label.into(),
            function: function.into(),
        }),
        None => Err(BlockReason::UnknownFunction {
            label: label.into(),
            function: function.into(),
        }),
    }
}

fn assigned(
    m: &Machine,
    c: &Configuration,
    tape: TapeIndex,
    value: Value,
    next: LabelId,
    function: &str,
) -> Result<(Configuration, i64), BlockReason> {
    if !value.belongs_to(&m.carriers[tape]) {
        return Err(BlockReason::ResultKind {
            label: m.label_name(c.label).into(),
            function: function.into(),
            tape,
        });
    }
    let mut out = c.clone();
    let index = out.write_scanned(tape, Cell::Value(value));
    out.label = next;
    Ok((out, index))
}

/// One step of the successor relation. Only assignments consume `token`.
pub fn step(m: &Machine, c: &Configuration, token: u64) -> Step {
    if c.label == m.final_label {
        return Step::Final;
    }
    let label = m.label_name(c.label);
    let Some(stm) = m.statement(c.label) else {
        return Step::Blocked(BlockReason::MissingStatement {
            label: label.into(),
        });
    };
    let info =
        |tape: Option<TapeIndex>, changed: Option<(TapeIndex, i64)>, token: Option<u64>| StepInfo {
            kind: stm.kind(),
            tape,
            changed,
            token,
        };
    match stm {
        Statement::Right { tape, next } | Statement::Left { tape, next } => {
            let mut out = c.clone();
            out.tapes[*tape].head += if matches!(stm, Statement::Right { .. }) {
                1
            } else {
                -1
            };
            out.label = *next;
            Step::Next(out, info(Some(*tape), None, None))
        }
        Statement::Write { tape, symbol, next } => {
            let mut out = c.clone();
            let index = out.write_scanned(*tape, Cell::Symbol(*symbol));
            out.label = *next;
            Step::Next(out, info(Some(*tape), Some((*tape, index)), None))
        }
        Statement::IfSymbol {
            tape,
            symbol,
            then,
            otherwise,
        } => {
            let mut out = c.clone();
            out.label = if c.scanned(*tape) == Cell::Symbol(*symbol) {
                *then
            } else {
                *otherwise
            };
            Step::Next(out, info(Some(*tape), None, None))
        }
        Statement::Assign {
            tape,
            function,
            args,
            next,
        } => {
            let (f, values) = match assign_target(m, c, function, args) {
                Ok(t) => t,
                Err(reason) => return Step::Blocked(reason),
            };
            let Some(value) = f.choose(&values, token) else {
                return Step::Blocked(BlockReason::EmptyDomain {
                    label: label.into(),
                    function: function.clone(),
                });
            };
            match assigned(m, c, *tape, value, *next, function) {
                Ok((out, index)) => {
                    Step::Next(out, info(Some(*tape), Some((*tape, index)), Some(token)))
                }
                Err(reason) => Step::Blocked(reason),
            }
        }
        Statement::IfTest {
            function,
            args,
            then,
            otherwise,
        } => {
            let f = match m.subroutines.get(function) {
                Some(Subroutine::Test(f)) => f,
                Some(Subroutine::Assign(_)) => {
                    return Step::Blocked(BlockReason::WrongSubroutineKind {
                        label: label.into(),
                        function: function.clone(),
                    })
                }
                None => {
                    return Step::Blocked(BlockReason::UnknownFunction {
                        label: label.into(),
                        function: function.clone(),
                    })
                }
            };
            let values = match gather_args(m, c, label, &f.signature().inputs, args) {
                Ok(v) => v,
                Err(reason) => return Step::Blocked(reason),
            };
            let next = match f.evaluate(&values) {
                None => {
                    return Step::Blocked(BlockReason::TestUndefined {
                        label: label.into(),
                        function: function.clone(),
                    })
                }
                Some(w) => match w.symbols() {
                    b"0" => *then,
                    b"1" => *otherwise,
                    _ => {
                        return Step::Blocked(BlockReason::TestOutOfRange {
                            label: label.into(),
                            function: function.clone(),
                            value: w.to_string(),
                        })
                    }
                },
            };
            let mut out = c.clone();
            out.label = next;
            Step::Next(out, info(None, None, None))
        }
    }
}

fn final_outcome(m: &Machine, c: &Configuration, steps: usize) -> RunOutcome {
    match c.output_cell() {
        Cell::Value(v) if v.belongs_to(&m.carriers[0]) => RunOutcome::Accepted { output: v, steps },
        _ => RunOutcome::RejectedAtFinal { steps },
    }
}

/// Runs one computation, drawing a token from `oracle` at each assignment
/// (0 once the oracle is exhausted).
pub fn run(
    m: &Machine,
    inputs: &[Value],
    oracle: impl IntoIterator<Item = u64>,
    max_steps: usize,
) -> Result<RunOutcome, MachineError> {
    run_traced(m, inputs, oracle, max_steps, |_| {})
}

/// [`run`], emitting one [`TraceRecord`] per step.
pub fn run_traced(
    m: &Machine,
    inputs: &[Value],
    oracle: impl IntoIterator<Item = u64>,
    max_steps: usize,
    mut sink: impl FnMut(&TraceRecord),
) -> Result<RunOutcome, MachineError> {
    let mut c = initial_configuration(m, inputs)?;
    let mut oracle = oracle.into_iter();
    let mut steps = 0;
    loop {
        if c.label == m.final_label {
            return Ok(final_outcome(m, &c, steps));
        }
        if steps >= max_steps {
            return Ok(RunOutcome::BudgetExceeded { steps });
        }
        let token = match m.statement(c.label) {
            Some(Statement::Assign { .. }) => oracle.next().unwrap_or(0),
            _ => 0,
        };
        let from = c.label;
        match step(m, &c, token) {
            Step::Next(next, info) => {
                steps += 1;
                sink(&TraceRecord {
                    step: steps,
                    label: m.label_name(from).to_string(),
                    next: m.label_name(next.label).to_string(),
                    kind: info.kind,
                    tape: info.tape,
                    heads: next.heads(),
                    changed: info.changed.map(|(tape, index)| ChangedCell {
                        tape,
                        index,
                        value: next.cell(tape, index).render(),
                    }),
                    token: info.token,
                });
                c = next;
            }
            Step::Final => unreachable!("final label handled above"),
            Step::Blocked(reason) => return Ok(RunOutcome::Blocked { reason, steps }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tri {
    Yes,
    No,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct Outcomes {
    /// Outputs of accepting leaves, without duplicates.
    pub values: Vec<Value>,
    /// `Yes` iff every maximal computation is accepting; `No` as soon as a
    /// finite non-accepting maximal computation exists; otherwise
    /// `Inconclusive` when some path ran out of budget.
    pub all_maximal_accepting: Tri,
    pub leaves: usize,
    pub first_rejection: Option<String>,
}

impl Outcomes {
    /// `f_M(x)` when it is determined within the budget.
    pub fn function_value(&self) -> Option<&[Value]> {
        (self.all_maximal_accepting == Tri::Yes).then_some(&self.values[..])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("at {label}: `{function}` cannot enumerate its values")]
    NotEnumerable { label: String, function: String },
    #[error("at {label}: `{function}` has {count} values, more than the branch limit {max}")]
    TooManyBranches {
        label: String,
        function: String,
        count: usize,
        max: usize,
    },
}

/// Explores the whole computation tree to depth `max_steps`.
pub fn enumerate_outcomes(
    m: &Machine,
    inputs: &[Value],
    max_steps: usize,
    max_branch: usize,
) -> Result<Outcomes, EnumerateError> {
    let mut values: Vec<Value> = Vec::new();
    let mut rejected = false;
    let mut budget_hit = false;
    let mut leaves = 0;
    let mut first_rejection = None;
    let mut reject = |why: String, leaves: &mut usize| {
        *leaves += 1;
        rejected = true;
        first_rejection.get_or_insert(why);
    };
    let mut stack = vec![(initial_configuration(m, inputs)?, 0usize)];
    while let Some((c, depth)) = stack.pop() {
        if c.label == m.final_label {
            match final_outcome(m, &c, depth) {
                RunOutcome::Accepted { output, .. } => {
                    leaves += 1;
                    if !values.contains(&output) {
                        values.push(output);
                    }
                }
                _ => reject(
                    format!(
                        "final label reached with {} in the output cell",
                        c.output_cell().render()
                    ),
                    &mut leaves,
                ),
            }
            continue;
        }
        if depth >= max_steps {
            budget_hit = true;
            leaves += 1;
            continue;
        }
        if let Some(Statement::Assign {
            tape,
            function,
            args,
            next,
        }) = m.statement(c.label)
        {
            let label = m.label_name(c.label);
            let (f, arg_values) = match assign_target(m, &c, function, args) {
                Ok(t) => t,
                Err(reason) => {
                    reject(reason.to_string(), &mut leaves);
                    continue;
                }
            };
            let Some(choices) = f.enumerate(&arg_values) else {
                return Err(EnumerateError::NotEnumerable {
                    label: label.into(),
                    function: function.clone(),
                });
            };
            if choices.len() > max_branch {
                return Err(EnumerateError::TooManyBranches {
                    label: label.into(),
                    function: function.clone(),
                    count: choices.len(),
                    max: max_branch,
                });
            }
            if choices.is_empty() {
                reject(
                    format!("at {label}: `{function}` has no value"),
                    &mut leaves,
                );
            }
            for value in choices.into_iter().rev() {
                match assigned(m, &c, *tape, value, *next, function) {
                    Ok((succ, _)) => stack.push((succ, depth + 1)),
                    Err(reason) => reject(reason.to_string(), &mut leaves),
                }
            }
            continue;
        }
        match step(m, &c, 0) {
            Step::Next(succ, _) => stack.push((succ, depth + 1)),
            Step::Final => unreachable!("final label handled above"),
            Step::Blocked(reason) => reject(reason.to_string(), &mut leaves),
        }
    }
    let all_maximal_accepting = if rejected {
        Tri::No
    } else if budget_hit {
        Tri::Inconclusive
    } else {
        Tri::Yes
    };
    Ok(Outcomes {
        values,
        all_maximal_accepting,
        leaves,
        first_rejection,
    })
}
