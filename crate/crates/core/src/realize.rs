//! Realization: checking that a name-level function realizes an abstract
//! one, lowering abstract machines to name-level machines, and evaluating
//! stream machines through generated word machines.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builtins::{word_assign, word_test, Registry};
use crate::machine::{
    enumerate_outcomes, run, seeded_tokens, CarrierId, Cell, Configuration, EnumerateError, Kind,
    Machine, RunOutcome, Statement, Subroutine, Tri, Value,
};
use crate::names::{stream_prefix, Stream, Word};
use crate::represent::{by_id, Membership, Rep};
use crate::type2gen::{FnClass, WordFunction};

/// Realizers for the functions of an abstract machine, and the
/// representation `δ_i` used on each tape.
#[derive(Clone)]
pub struct RealizerTable {
    pub functions: BTreeMap<String, Subroutine>,
    pub representations: Vec<Rep>,
}

impl fmt::Debug for RealizerTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let reps: Vec<String> = self.representations.iter().map(|r| r.id()).collect();
        f.debug_struct("RealizerTable")
            .field("functions", &self.functions)
            .field("representations", &reps)
            .finish()
    }
}

/// The on-disk form of a [`RealizerTable`]: representation ids per tape and
/// a map from abstract function names to registry names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizerConfig {
    pub representations: Vec<String>,
    #[serde(default)]
    pub functions: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LowerError {
    #[error("unknown representation `{0}`")]
    UnknownRepresentation(String),
    #[error("unknown realizer `{realizer}` for `{function}`")]
    UnknownRealizer { function: String, realizer: String },
    #[error("{found} representations given for {expected} tapes")]
    TapeCount { expected: usize, found: usize },
    #[error("tape {tape}: representation `{rep}` names `{rep_carrier}` objects, the tape holds `{tape_carrier}`")]
    TapeCarrier {
        tape: usize,
        rep: String,
        rep_carrier: CarrierId,
        tape_carrier: CarrierId,
    },
    #[error("at {label}: no realizer for `{function}`")]
    MissingRealizer { label: String, function: String },
    #[error("at {label}: realizer `{realizer}` for `{function}` does not fit: {reason}")]
    SignatureMismatch {
        label: String,
        function: String,
        realizer: String,
        reason: String,
    },
}

impl RealizerTable {
    pub fn from_config(config: &RealizerConfig, registry: &Registry) -> Result<Self, LowerError> {
        let representations = config
            .representations
            .iter()
            .map(|id| by_id(id).ok_or_else(|| LowerError::UnknownRepresentation(id.clone())))
            .collect::<Result<_, _>>()?;
        let functions = config
            .functions
            .iter()
            .map(|(f, name)| {
                let sub = registry
                    .get(name)
                    .ok_or_else(|| LowerError::UnknownRealizer {
                        function: f.clone(),
                        realizer: name.clone(),
                    })?;
                Ok((f.clone(), sub.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            functions,
            representations,
        })
    }
}

fn fits(found: &CarrierId, expected: &CarrierId) -> bool {
    found.compatible(expected)
}

/// Replaces every subroutine of `n` by its realizer and every carrier by the
/// name carrier of its representation. Labels, Γ, tape count and statement
/// skeleton are kept.
pub fn lower_machine(n: &Machine, rt: &RealizerTable) -> Result<Machine, LowerError> {
    if rt.representations.len() != n.tape_count() {
        return Err(LowerError::TapeCount {
            expected: n.tape_count(),
            found: rt.representations.len(),
        });
    }
    for (tape, (rep, carrier)) in rt.representations.iter().zip(&n.carriers).enumerate() {
        if !fits(&rep.object_carrier(), carrier) {
            return Err(LowerError::TapeCarrier {
                tape,
                rep: rep.id(),
                rep_carrier: rep.object_carrier(),
                tape_carrier: carrier.clone(),
            });
        }
    }
    let names: Vec<CarrierId> = rt
        .representations
        .iter()
        .map(|r| r.name_carrier())
        .collect();
    let mut m = n.clone();
    m.carriers = names.clone();
    m.subroutines = BTreeMap::new();
    for (label, stmt) in m.statements.iter_mut().enumerate() {
        let Some(stmt) = stmt else { continue };
        let Some(function) = stmt.function().map(str::to_string) else {
            continue;
        };
        let label = n.label_name(label).to_string();
        let realizer = rt
            .functions
            .get(&function)
            .ok_or_else(|| LowerError::MissingRealizer {
                label: label.clone(),
                function: function.clone(),
            })?;
        let mismatch = |reason: String| LowerError::SignatureMismatch {
            label: label.clone(),
            function: function.clone(),
            realizer: realizer.name().to_string(),
            reason,
        };
        let sig = realizer.signature();
        let (args, target) = match &*stmt {
            Statement::Assign { tape, args, .. } => (args, Some(*tape)),
            Statement::IfTest { args, .. } => (args, None),
            _ => unreachable!("only assignments and tests call functions"),
        };
        if realizer.is_test() != target.is_none() {
            let want = if target.is_some() {
                "an assignment"
            } else {
                "a test"
            };
            return Err(mismatch(format!("expected {want}")));
        }
        if sig.arity() != args.len() {
            return Err(mismatch(format!(
                "takes {} arguments, the call passes {}",
                sig.arity(),
                args.len()
            )));
        }
        for (j, (tape, expected)) in args.iter().zip(&sig.inputs).enumerate() {
            if !fits(&names[*tape], expected) {
                return Err(mismatch(format!(
                    "argument {} reads `{}` names, expects `{expected}`",
                    j + 1,
                    names[*tape]
                )));
            }
        }
        if let Some(tape) = target {
            if !fits(&sig.output, &names[tape]) {
                return Err(mismatch(format!(
                    "returns `{}`, tape {tape} holds `{}` names",
                    sig.output, names[tape]
                )));
            }
        }
        let name = realizer.name().to_string();
        match stmt {
            Statement::Assign { function, .. } | Statement::IfTest { function, .. } => {
                *function = name.clone()
            }
            _ => {}
        }
        m.subroutines.insert(name, realizer.clone());
    }
    Ok(m)
}

/// The value set of a function at a point, as far as it could be determined.
#[derive(Clone, Debug)]
pub enum Outputs {
    Values(Vec<Value>),
    /// Some of the values, from seeded runs of a machine that cannot
    /// enumerate its choices.
    Sampled(Vec<Value>),
    /// Outside the domain.
    Empty,
    /// Not determined within the budget.
    Unknown(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Verified {
        precision: u32,
    },
    Refuted {
        reason: String,
    },
    Inconclusive {
        reason: String,
    },
    /// The abstract function is undefined here, so there is nothing to check.
    Skipped,
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Verified { precision } => write!(f, "verified at {precision}"),
            Verdict::Refuted { reason } => write!(f, "refuted: {reason}"),
            Verdict::Inconclusive { reason } => write!(f, "inconclusive: {reason}"),
            Verdict::Skipped => f.write_str("skipped"),
        }
    }
}

/// Objects `y` together with names `x` of them.
#[derive(Clone, Debug)]
pub struct Sample {
    pub objects: Vec<Value>,
    pub names: Vec<Value>,
}

impl Sample {
    /// Names `objects` with the canonical encodings of `reps`.
    pub fn encode(objects: Vec<Value>, reps: &[Rep]) -> Result<Self, crate::represent::RepError> {
        let names = objects
            .iter()
            .zip(reps)
            .map(|(y, r)| r.encode(y))
            .collect::<Result<_, _>>()?;
        Ok(Self { objects, names })
    }
}

/// Checks `f(x) ≠ ∅` and that every `x₀ ∈ f(x)` names, at precision `d`,
/// some element of `g(y)`.
pub fn check_sample(
    f: &dyn Fn(&[Value]) -> Outputs,
    g: &dyn Fn(&[Value]) -> Outputs,
    output_rep: &Rep,
    sample: &Sample,
    d: u32,
    budget: usize,
) -> Verdict {
    let (targets, complete) = match g(&sample.objects) {
        Outputs::Empty => return Verdict::Skipped,
        Outputs::Unknown(why) => {
            return Verdict::Inconclusive {
                reason: format!("abstract side: {why}"),
            }
        }
        Outputs::Values(v) => (v, true),
        Outputs::Sampled(v) => (v, false),
    };
    let names = match f(&sample.names) {
        Outputs::Empty => {
            return Verdict::Refuted {
                reason: "no value on a name of a point in the domain".into(),
            }
        }
        Outputs::Unknown(why) => {
            return Verdict::Inconclusive {
                reason: format!("name side: {why}"),
            }
        }
        Outputs::Values(v) | Outputs::Sampled(v) if v.is_empty() => {
            return Verdict::Refuted {
                reason: "no value on a name of a point in the domain".into(),
            }
        }
        Outputs::Values(v) | Outputs::Sampled(v) => v,
    };
    let mut undetermined = None;
    for x0 in &names {
        let mut refutations = Vec::new();
        let mut found = false;
        for y0 in &targets {
            match output_rep.member_at_precision(x0, y0, d, budget) {
                Membership::Consistent { .. } => {
                    found = true;
                    break;
                }
                Membership::Refuted(why) => refutations.push(why),
                Membership::Undetermined(why) => {
                    undetermined.get_or_insert(why);
                }
            }
        }
        if !found && refutations.len() == targets.len() && !complete {
            return Verdict::Inconclusive {
                reason: "no sampled abstract value matches; the abstract side was only sampled"
                    .into(),
            };
        }
        if !found && refutations.len() == targets.len() {
            let reason = refutations
                .into_iter()
                .next()
                .unwrap_or_else(|| "the abstract side has no value".into());
            return Verdict::Refuted { reason };
        }
        if !found {
            return Verdict::Inconclusive {
                reason: undetermined.unwrap_or_default(),
            };
        }
    }
    Verdict::Verified { precision: d }
}

pub fn check_realization(
    f: &dyn Fn(&[Value]) -> Outputs,
    g: &dyn Fn(&[Value]) -> Outputs,
    output_rep: &Rep,
    samples: &[Sample],
    d: u32,
    budget: usize,
) -> Vec<Verdict> {
    samples
        .iter()
        .map(|s| check_sample(f, g, output_rep, s, d, budget))
        .collect()
}

/// Step and branching limits for running machines, and the number of
/// records member checks may read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budgets {
    pub max_steps: usize,
    pub max_branch: usize,
    pub probe: usize,
    /// Seeds tried when a subroutine can only be sampled.
    pub seeds: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            max_steps: 10_000,
            max_branch: 16,
            probe: 200,
            seeds: 8,
        }
    }
}

/// `f_M(x)` as [`Outputs`]. Machines whose subroutines cannot enumerate
/// their values are run on `budgets.seeds` seeded token sequences instead,
/// which only samples `f_M(x)`.
pub fn machine_outputs(m: &Machine, inputs: &[Value], budgets: &Budgets) -> Outputs {
    match enumerate_outcomes(m, inputs, budgets.max_steps, budgets.max_branch) {
        Ok(o) => match o.all_maximal_accepting {
            Tri::Yes => Outputs::Values(o.values),
            Tri::No => Outputs::Empty,
            Tri::Inconclusive => {
                Outputs::Unknown(format!("step budget {} exhausted", budgets.max_steps))
            }
        },
        Err(EnumerateError::NotEnumerable { .. }) => {
            let mut values: Vec<Value> = Vec::new();
            for seed in 0..budgets.seeds.max(1) {
                match run(m, inputs, seeded_tokens(seed), budgets.max_steps) {
                    Ok(RunOutcome::Accepted { output, .. }) => {
                        if !values.contains(&output) {
                            values.push(output);
                        }
                    }
                    Ok(RunOutcome::BudgetExceeded { .. }) => {
                        return Outputs::Unknown(format!(
                            "step budget {} exhausted",
                            budgets.max_steps
                        ))
                    }
                    Ok(_) => return Outputs::Empty,
                    Err(e) => return Outputs::Unknown(e.to_string()),
                }
            }
            Outputs::Sampled(values)
        }
        Err(e) => Outputs::Unknown(e.to_string()),
    }
}

/// Runs `m` on names and `n` on the named objects, and checks that `f_M`
/// realizes `f_N` via the input representations and `output_rep`.
pub fn check_machine_realization_empirical(
    m: &Machine,
    n: &Machine,
    input_reps: &[Rep],
    output_rep: &Rep,
    objects: &[Vec<Value>],
    d: u32,
    budgets: &Budgets,
) -> Vec<Verdict> {
    let f = |x: &[Value]| machine_outputs(m, x, budgets);
    let g = |y: &[Value]| machine_outputs(n, y, budgets);
    objects
        .iter()
        .map(|y| match Sample::encode(y.clone(), input_reps) {
            Ok(sample) => check_sample(&f, &g, output_rep, &sample, d, budgets.probe),
            Err(e) => Verdict::Inconclusive {
                reason: format!("cannot encode the sample: {e}"),
            },
        })
        .collect()
}

/// Check with the representations of a realizer table: tapes `1..=k` for
/// the inputs and tape 0 for the output.
pub fn check_lowered(
    n: &Machine,
    rt: &RealizerTable,
    objects: &[Vec<Value>],
    d: u32,
    budgets: &Budgets,
) -> Result<Vec<Verdict>, LowerError> {
    let m = lower_machine(n, rt)?;
    let inputs = &rt.representations[1..=n.inputs];
    Ok(check_machine_realization_empirical(
        &m,
        n,
        inputs,
        &rt.representations[0],
        objects,
        d,
        budgets,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("tape {tape} holds `{carrier}`, not streams")]
    NotStream { tape: usize, carrier: CarrierId },
    #[error("at {label}: no generator for `{function}`")]
    MissingGenerator { label: String, function: String },
    #[error("at {label}: generator `{generator}` for `{function}` is {class:?}, {expected:?} is required")]
    Class {
        label: String,
        function: String,
        generator: String,
        class: FnClass,
        expected: FnClass,
    },
    #[error("at {label}: generator `{generator}` takes {found} arguments, `{function}` takes {expected}")]
    Arity {
        label: String,
        function: String,
        generator: String,
        expected: usize,
        found: usize,
    },
}

/// The word machine with the skeleton of the stream machine `n` whose
/// subroutines are the generators `gen` of `n`'s subroutines.
pub fn generate_word_machine(
    n: &Machine,
    gen: &BTreeMap<String, WordFunction>,
) -> Result<Machine, GenerateError> {
    for (tape, carrier) in n.carriers.iter().enumerate() {
        if carrier.kind() != Some(Kind::Stream) {
            return Err(GenerateError::NotStream {
                tape,
                carrier: carrier.clone(),
            });
        }
    }
    let mut m = n.clone();
    m.carriers = vec![CarrierId::new("word"); n.tape_count()];
    m.subroutines = BTreeMap::new();
    for (label, stmt) in m.statements.iter_mut().enumerate() {
        let Some(stmt) = stmt else { continue };
        let (function, arity, expected) = match stmt {
            Statement::Assign { function, args, .. } => (function, args.len(), FnClass::Monotone),
            Statement::IfTest { function, args, .. } => {
                (function, args.len(), FnClass::MonotoneConstant)
            }
            _ => continue,
        };
        let label = n.label_name(label).to_string();
        let h = gen
            .get(function.as_str())
            .ok_or_else(|| GenerateError::MissingGenerator {
                label: label.clone(),
                function: function.clone(),
            })?;
        if h.class() != expected {
            return Err(GenerateError::Class {
                label,
                function: function.clone(),
                generator: h.name().into(),
                class: h.class(),
                expected,
            });
        }
        if h.arity() != arity {
            return Err(GenerateError::Arity {
                label,
                function: function.clone(),
                generator: h.name().into(),
                expected: arity,
                found: h.arity(),
            });
        }
        let sub = if expected == FnClass::Monotone {
            word_assign(h)
        } else {
            word_test(h)
        };
        *function = h.name().to_string();
        m.subroutines.insert(function.clone(), sub);
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EvalVerdict {
    /// The first output of length at least the demand, reached with input prefixes of length `at`.
    Output {
        word: Word,
        at: usize,
    },
    InsufficientPrecision {
        best: Option<Word>,
        limit: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MonotonicityError {
    #[error("output {previous} at prefix length {} is not a prefix of {current} at {at}", at - 1)]
    NotAChain {
        previous: Word,
        current: Word,
        at: usize,
    },
    #[error("accepted at prefix length {}, not at {at}", at - 1)]
    LostAcceptance { at: usize },
    #[error(transparent)]
    Machine(#[from] crate::machine::MachineError),
}

/// Runs `m` on `q^{<e}` for `e = 1, 2, …, limit` and returns the first
/// output of length at least `demand`. Outputs must grow along `≺`.
pub fn eval_stream_machine(
    m: &Machine,
    q: &[Stream],
    demand: usize,
    limit: usize,
    max_steps: usize,
) -> Result<EvalVerdict, MonotonicityError> {
    let mut best: Option<Word> = None;
    for e in 1..=limit {
        let inputs: Vec<Value> = stream_prefix(q, e).into_iter().map(Value::Word).collect();
        let outcome = run(m, &inputs, std::iter::repeat(0), max_steps)?;
        let word = match outcome.output() {
            Some(Value::Word(w)) => w.clone(),
            _ => {
                if best.is_some() && !matches!(outcome, RunOutcome::BudgetExceeded { .. }) {
                    return Err(MonotonicityError::LostAcceptance { at: e });
                }
                continue;
            }
        };
        if let Some(previous) = &best {
            if !previous.is_prefix_of(&word) {
                return Err(MonotonicityError::NotAChain {
                    previous: previous.clone(),
                    current: word,
                    at: e,
                });
            }
        }
        if word.len() >= demand {
            return Ok(EvalVerdict::Output { word, at: e });
        }
        best = Some(word);
    }
    Ok(EvalVerdict::InsufficientPrecision { best, limit })
}

fn cell_prefix(a: &Cell, b: &Cell) -> bool {
    match (a, b) {
        (Cell::Symbol(x), Cell::Symbol(y)) => x == y,
        (Cell::Value(Value::Word(u)), Cell::Value(Value::Word(v))) => u.is_prefix_of(v),
        (Cell::Value(x), Cell::Value(y)) => x == y,
        _ => false,
    }
}

/// `c ≺₂ c'`: same label and heads, and every cell of `c` equals the
/// corresponding cell of `c'` or is a word prefix of it.
pub fn config_prefix(c: &Configuration, c2: &Configuration) -> bool {
    if c.label != c2.label || c.heads() != c2.heads() || c.tapes.len() != c2.tapes.len() {
        return false;
    }
    (0..c.tapes.len()).all(|t| {
        let indices = c.tapes[t]
            .stored()
            .chain(c2.tapes[t].stored())
            .map(|(i, _)| *i);
        indices
            .into_iter()
            .all(|i| cell_prefix(&c.cell(t, i), &c2.cell(t, i)))
    })
}

/// `P(κ)`: the least length of a word in any cell, or `None` if no cell
/// holds a word.
pub fn precision_gauge(c: &Configuration) -> Option<usize> {
    c.tapes
        .iter()
        .flat_map(|t| t.stored())
        .filter_map(|(_, cell)| match cell {
            Cell::Value(Value::Word(w)) => Some(w.len()),
            _ => None,
        })
        .min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::interval_add;
    use crate::builtins::complete_intervals;
    use crate::corpus;
    use crate::exact::{int, pow2_neg, rat, Rational};
    use crate::machine::{initial_configuration, step, Step};
    use crate::represent::{rho, rho_encode, IntervalRep, SriCode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn real_adder_table(broken: bool) -> RealizerTable {
        let realizer = if broken {
            "stream.sri_add_skewed"
        } else {
            "stream.sri_add"
        };
        let config = RealizerConfig {
            representations: vec!["rho".into(); 3],
            functions: [("real.add".to_string(), realizer.to_string())].into(),
        };
        RealizerTable::from_config(&config, &Registry::standard()).unwrap()
    }

    fn random_rational(rng: &mut impl Rng) -> Rational {
        rat(rng.gen_range(-1000..=1000), rng.gen_range(1..=300))
    }

    fn pairs(n: usize, seed: u64) -> Vec<Vec<Value>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                vec![
                    Value::Rational(random_rational(&mut rng)),
                    Value::Rational(random_rational(&mut rng)),
                ]
            })
            .collect()
    }

    fn edges(m: &Machine) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = m
            .statements
            .iter()
            .enumerate()
            .flat_map(|(l, s)| {
                s.iter()
                    .flat_map(move |s| s.successors().into_iter().map(move |t| (l, t)))
            })
            .collect();
        e.sort();
        e
    }

    #[test]
    fn lowering_the_adder() {
        let n = corpus::machine("real_adder").unwrap();
        let m = lower_machine(&n, &real_adder_table(false)).unwrap();
        assert_eq!(m.labels, n.labels);
        assert_eq!(edges(&m), edges(&n));
        assert_eq!(m.carriers, vec![CarrierId::new("stream"); 3]);
        assert_eq!(m.statement(0).unwrap().function(), Some("stream.sri_add"));
        assert!(crate::dsl::validate(&m).iter().all(|d| !d.is_error()));
    }

    #[test]
    fn lowering_errors_name_label_and_function() {
        let n = corpus::machine("real_adder").unwrap();
        let mut rt = real_adder_table(false);
        rt.functions.clear();
        let e = lower_machine(&n, &rt).unwrap_err();
        assert_eq!(
            e,
            LowerError::MissingRealizer {
                label: "add".into(),
                function: "real.add".into()
            }
        );
        assert!(e.to_string().contains("add") && e.to_string().contains("real.add"));

        let mut rt = real_adder_table(false);
        rt.functions.insert(
            "real.add".into(),
            Registry::standard().get("word.sri_add").unwrap().clone(),
        );
        assert!(matches!(
            lower_machine(&n, &rt),
            Err(LowerError::SignatureMismatch { .. })
        ));

        let mut rt = real_adder_table(false);
        rt.representations.pop();
        assert!(matches!(
            lower_machine(&n, &rt),
            Err(LowerError::TapeCount { .. })
        ));
    }

    #[test]
    fn lowered_adder_realizes_the_adder() {
        let n = corpus::machine("real_adder").unwrap();
        let verdicts = check_lowered(
            &n,
            &real_adder_table(false),
            &pairs(20, 3),
            50,
            &Budgets::default(),
        )
        .unwrap();
        assert!(verdicts.iter().all(Verdict::is_verified), "{verdicts:?}");
    }

    #[test]
    fn broken_realizer_is_refuted() {
        let n = corpus::machine("real_adder").unwrap();
        let verdicts = check_lowered(
            &n,
            &real_adder_table(true),
            &pairs(10, 4),
            20,
            &Budgets::default(),
        )
        .unwrap();
        assert!(verdicts.iter().any(Verdict::is_refuted), "{verdicts:?}");
    }

    #[test]
    fn check_realization_examples() {
        let rho: Rep = Arc::new(rho());
        let g = |y: &[Value]| match (y[0].as_rational(), y[1].as_rational()) {
            (Some(a), Some(b)) => Outputs::Values(vec![Value::Rational(a + b)]),
            _ => Outputs::Empty,
        };
        let sample = Sample::encode(
            vec![Value::Rational(rat(1, 3)), Value::Rational(rat(1, 6))],
            &[rho.clone(), rho.clone()],
        )
        .unwrap();
        let add = |x: &[Value]| {
            Outputs::Values(vec![Value::Stream(interval_add(
                x[0].as_stream().unwrap(),
                x[1].as_stream().unwrap(),
            ))])
        };
        assert!(check_sample(&add, &g, &rho, &sample, 50, 200).is_verified());

        let garbage = |_: &[Value]| Outputs::Values(vec![Value::Stream(rho_encode(&int(5)))]);
        assert!(check_sample(&garbage, &g, &rho, &sample, 10, 200).is_refuted());

        let diverge = |_: &[Value]| Outputs::Unknown("budget".into());
        assert!(matches!(
            check_sample(&diverge, &g, &rho, &sample, 10, 200),
            Verdict::Inconclusive { .. }
        ));

        let empty = |_: &[Value]| Outputs::Empty;
        assert_eq!(
            check_sample(&add, &empty, &rho, &sample, 10, 200),
            Verdict::Skipped
        );
        assert!(check_sample(&empty, &g, &rho, &sample, 10, 200).is_refuted());

        let sampled_wrong = |_: &[Value]| Outputs::Sampled(vec![Value::Rational(int(7))]);
        assert!(matches!(
            check_sample(&add, &sampled_wrong, &rho, &sample, 10, 200),
            Verdict::Inconclusive { .. }
        ));
        let sampled = |y: &[Value]| match g(y) {
            Outputs::Values(v) => Outputs::Sampled(v),
            o => o,
        };
        assert!(check_sample(&add, &sampled, &rho, &sample, 10, 200).is_verified());
    }

    #[test]
    fn abstract_input_outside_domain_is_skipped() {
        let n = corpus::machine("real_adder").unwrap();
        let mut bad = n.clone();
        bad.statements[0] = Some(Statement::IfTest {
            function: "test.never".into(),
            args: vec![1],
            then: 1,
            otherwise: 1,
        });
        bad.subroutines.insert(
            "test.never".into(),
            Registry::standard().get("test.never").unwrap().clone(),
        );
        let m = lower_machine(&n, &real_adder_table(false)).unwrap();
        let rho: Rep = Arc::new(rho());
        let v = check_machine_realization_empirical(
            &m,
            &bad,
            &[rho.clone(), rho.clone()],
            &rho,
            &pairs(2, 1),
            10,
            &Budgets::default(),
        );
        assert_eq!(v, vec![Verdict::Skipped; 2]);
    }

    #[test]
    fn realization_is_downward_transitive() {
        let registry = Registry::standard();
        let gamma: Rep = Arc::new(SriCode);
        let delta: Rep = Arc::new(IntervalRep);
        let rho: Rep = Arc::new(rho());
        let real_add = |y: &[Value]| {
            Outputs::Values(vec![Value::Rational(
                y[0].as_rational().unwrap() + y[1].as_rational().unwrap(),
            )])
        };
        let call = |name: &str| {
            let Subroutine::Assign(f) = registry.get(name).unwrap().clone() else {
                unreachable!()
            };
            move |x: &[Value]| {
                f.choose(x, 0)
                    .map_or(Outputs::Empty, |v| Outputs::Values(vec![v]))
            }
        };
        let sri_add = call("sri.add");
        let stream_add = call("stream.sri_add");
        for y in pairs(10, 9) {
            let upper = Sample::encode(y.clone(), &[delta.clone(), delta.clone()]).unwrap();
            assert!(check_sample(&sri_add, &real_add, &delta, &upper, 30, 200).is_verified());
            let lower =
                Sample::encode(upper.names.clone(), &[gamma.clone(), gamma.clone()]).unwrap();
            assert!(check_sample(&stream_add, &sri_add, &gamma, &lower, 30, 200).is_verified());
            let composed = Sample::encode(y, &[rho.clone(), rho.clone()]).unwrap();
            assert!(check_sample(&stream_add, &real_add, &rho, &composed, 30, 200).is_verified());
        }
    }

    #[test]
    fn generation_keeps_the_skeleton() {
        let registry = Registry::standard();
        let n = corpus::machine("stream_adder").unwrap();
        let m = generate_word_machine(&n, &registry.default_generators()).unwrap();
        assert_eq!(m.labels, n.labels);
        assert_eq!(edges(&m), edges(&n));
        assert_eq!(m.statement(0).unwrap().function(), Some("word.sri_add"));
        let expected = Machine {
            name: n.name.clone(),
            ..corpus::machine("mono_adder").unwrap()
        };
        assert_eq!(m, expected);

        let mut gens = registry.default_generators();
        gens.insert(
            "stream.sri_add".into(),
            registry.generator("word.first_is_zero").unwrap().clone(),
        );
        assert!(matches!(
            generate_word_machine(&n, &gens),
            Err(GenerateError::Class { .. })
        ));
        assert!(matches!(
            generate_word_machine(&corpus::machine("real_adder").unwrap(), &gens),
            Err(GenerateError::NotStream { tape: 0, .. })
        ));
        gens.remove("stream.sri_add");
        assert!(matches!(
            generate_word_machine(&n, &gens),
            Err(GenerateError::MissingGenerator { .. })
        ));
    }

    #[test]
    fn eval_adder_through_word_machine() {
        let m = corpus::machine("mono_adder").unwrap();
        let q = [rho_encode(&rat(1, 3)), rho_encode(&rat(1, 6))];
        let mut demand = 64;
        let records = loop {
            let EvalVerdict::Output { word, .. } =
                eval_stream_machine(&m, &q, demand, 100_000, 1000).unwrap()
            else {
                panic!("insufficient precision at demand {demand}")
            };
            let records = complete_intervals(&word);
            if records.iter().any(|r| r.width() <= pow2_neg(20)) {
                break records;
            }
            demand *= 2;
        };
        assert!(records.iter().all(|r| r.contains(&rat(1, 2))));
    }

    #[test]
    fn eval_constant_and_insufficient() {
        let m = corpus::machine("const11").unwrap();
        let zero = Stream::periodic(Word::empty(), Word::from("0"));
        let inputs = vec![zero; m.inputs];
        assert_eq!(
            eval_stream_machine(&m, &inputs, 2, 10, 100).unwrap(),
            EvalVerdict::Output {
                word: Word::from("11"),
                at: 1
            }
        );
        let adder = corpus::machine("mono_adder").unwrap();
        let flat = crate::names::interval_stream(|_| crate::exact::Interval {
            lo: int(0),
            hi: int(1),
        });
        let q = [flat.clone(), flat];
        let v = eval_stream_machine(&adder, &q, 100_000, 100, 1000).unwrap();
        assert!(matches!(
            v,
            EvalVerdict::InsufficientPrecision { limit: 100, .. }
        ));
    }

    #[test]
    fn config_prefix_examples() {
        let m = corpus::machine("mono_adder").unwrap();
        let w = |s: &str| Value::word(s);
        let c = initial_configuration(&m, &[w("01"), w("1")]).unwrap();
        let c2 = initial_configuration(&m, &[w("011"), w("1")]).unwrap();
        assert!(config_prefix(&c, &c));
        assert!(config_prefix(&c, &c2));
        assert!(!config_prefix(&c2, &c));
        let Step::Next(next, _) = step(&m, &c, 0) else {
            panic!()
        };
        assert!(!config_prefix(&c, &next));
        assert_eq!(precision_gauge(&c), Some(1));
        assert_eq!(precision_gauge(&c2), Some(1));
    }

    #[test]
    fn simulation_invariant_between_precisions() {
        let m = corpus::machine("mono_branch").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let q: Vec<Stream> = (0..m.inputs)
                .map(|_| {
                    let bits: String = (0..40)
                        .map(|_| if rng.gen_bool(0.5) { '1' } else { '0' })
                        .collect();
                    Stream::periodic(Word::from(bits.as_str()), Word::from("0"))
                })
                .collect();
            for e in 1..12 {
                let at = |e| -> Vec<Value> {
                    stream_prefix(&q, e).into_iter().map(Value::Word).collect()
                };
                let mut a = initial_configuration(&m, &at(e)).unwrap();
                let mut b = initial_configuration(&m, &at(e + 1)).unwrap();
                loop {
                    assert!(config_prefix(&a, &b));
                    match (step(&m, &a, 0), step(&m, &b, 0)) {
                        (Step::Next(a2, _), Step::Next(b2, _)) => (a, b) = (a2, b2),
                        (Step::Next(..), _) => panic!("a shorter prefix ran further"),
                        _ => break,
                    }
                }
            }
        }
    }
}
