//! Splitting a machine that calls an oracle `g` at most once per run into a
//! pre-processor `M_H`, which computes the oracle's argument, and a
//! post-processor `M_G`, which finishes the computation from the answer.
//! Together they witness `f_M ≤_W g`.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::builtins::Registry;
use crate::machine::{
    run, CarrierId, LabelId, Machine, RunOutcome, Statement, Subroutine, TapeIndex, Value,
};
use crate::names::Stream;
use crate::realize::Verdict;

/// Successor lists of the label graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineGraph {
    pub successors: Vec<Vec<LabelId>>,
}

pub fn build_graph(m: &Machine) -> MachineGraph {
    let successors = m
        .statements
        .iter()
        .map(|s| {
            let mut next = s.as_ref().map(Statement::successors).unwrap_or_default();
            next.dedup();
            next
        })
        .collect();
    MachineGraph { successors }
}

impl MachineGraph {
    /// Edge set as sorted pairs.
    pub fn edges(&self) -> Vec<(LabelId, LabelId)> {
        let mut e: Vec<_> = self
            .successors
            .iter()
            .enumerate()
            .flat_map(|(l, next)| next.iter().map(move |t| (l, *t)))
            .collect();
        e.sort();
        e.dedup();
        e
    }

    /// Shortest path from any of `starts` to a label in `targets`, as the
    /// list of labels visited.
    fn shortest_path(&self, starts: &[LabelId], targets: &[LabelId]) -> Option<Vec<LabelId>> {
        let mut parent: Vec<Option<LabelId>> = vec![None; self.successors.len()];
        let mut seen = vec![false; self.successors.len()];
        let mut queue = VecDeque::new();
        for s in starts {
            if !seen[*s] {
                seen[*s] = true;
                queue.push_back(*s);
            }
        }
        while let Some(l) = queue.pop_front() {
            if targets.contains(&l) {
                let mut path = vec![l];
                let mut at = l;
                while let Some(p) = parent[at] {
                    path.push(p);
                    at = p;
                }
                path.reverse();
                return Some(path);
            }
            for n in &self.successors[l] {
                if !seen[*n] {
                    seen[*n] = true;
                    parent[*n] = Some(l);
                    queue.push_back(*n);
                }
            }
        }
        None
    }
}

/// A path from the initial label through two uses of the oracle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Error)]
#[error("`{function}` is used twice on the path {}", path.join(" -> "))]
pub struct SingleUseViolation {
    pub function: String,
    pub path: Vec<String>,
}

/// Whether every path from the initial label visits labels calling `g_id`
/// at most once in total.
pub fn check_single_use(m: &Machine, g_id: &str) -> Result<(), SingleUseViolation> {
    let graph = build_graph(m);
    let sites = m.labels_using(g_id);
    for site in &sites {
        let Some(to_site) = graph.shortest_path(&[Machine::INITIAL], &[*site]) else {
            continue;
        };
        if let Some(onward) = graph.shortest_path(&graph.successors[*site], &sites) {
            let path = to_site
                .iter()
                .chain(&onward)
                .map(|l| m.label_name(*l).to_string())
                .collect();
            return Err(SingleUseViolation {
                function: g_id.into(),
                path,
            });
        }
    }
    Ok(())
}

/// Enumerates every path from the initial label visiting at most `max_len`
/// labels and reports whether none of them visits `g_id` twice.
pub fn single_use_by_paths(m: &Machine, g_id: &str, max_len: usize) -> bool {
    let graph = build_graph(m);
    let sites = m.labels_using(g_id);
    let mut stack = vec![(Machine::INITIAL, 1usize, 0usize)];
    while let Some((l, len, uses)) = stack.pop() {
        let uses = uses + usize::from(sites.contains(&l));
        if uses >= 2 {
            return false;
        }
        if len < max_len {
            stack.extend(graph.successors[l].iter().map(|n| (*n, len + 1, uses)));
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error(transparent)]
    NotSingleUse(#[from] SingleUseViolation),
    #[error("splitting needs exactly one input tape, the machine has {0}")]
    Inputs(usize),
    #[error("at {label}: `{function}` is used as a test")]
    TestUse { label: String, function: String },
    #[error("at {label}: `{function}` takes {arity} arguments, the oracle must take one")]
    Arity {
        label: String,
        function: String,
        arity: usize,
    },
    #[error("at {label}: argument tape holds `{argument}`, the output tape holds `{output}`")]
    Carrier {
        label: String,
        argument: CarrierId,
        output: CarrierId,
    },
    #[error("the oracle's answers land on tapes holding `{0}` and `{1}`")]
    AnswerCarriers(CarrierId, CarrierId),
}

/// The oracle call sites as `(label, target tape, argument tape)`.
fn sites(m: &Machine, g_id: &str) -> Result<Vec<(LabelId, TapeIndex, TapeIndex)>, SplitError> {
    check_single_use(m, g_id)?;
    if m.inputs != 1 {
        return Err(SplitError::Inputs(m.inputs));
    }
    m.labels_using(g_id)
        .into_iter()
        .map(|l| match m.statement(l) {
            Some(Statement::Assign { tape, args, .. }) if args.len() == 1 => {
                Ok((l, *tape, args[0]))
            }
            Some(Statement::Assign { args, .. }) => Err(SplitError::Arity {
                label: m.label_name(l).into(),
                function: g_id.into(),
                arity: args.len(),
            }),
            _ => Err(SplitError::TestUse {
                label: m.label_name(l).into(),
                function: g_id.into(),
            }),
        })
        .collect()
}

fn identity() -> Subroutine {
    Registry::standard()
        .get("id")
        .expect("id is a standard function")
        .clone()
}

/// Drops table entries no statement calls.
fn prune_subroutines(m: &mut Machine) {
    let used: Vec<String> = m
        .statements
        .iter()
        .flatten()
        .filter_map(|s| s.function().map(String::from))
        .collect();
    m.subroutines.retain(|name, _| used.contains(name));
}

/// `M_H`: every `i := g(i₁) -> l'` becomes `0 := id(i₁) -> l_f`.
pub fn split_h(m: &Machine, g_id: &str) -> Result<Machine, SplitError> {
    let sites = sites(m, g_id)?;
    let mut out = m.clone();
    for (label, _, arg) in sites {
        if m.carriers[arg] != m.carriers[0] {
            return Err(SplitError::Carrier {
                label: m.label_name(label).into(),
                argument: m.carriers[arg].clone(),
                output: m.carriers[0].clone(),
            });
        }
        out.statements[label] = Some(Statement::Assign {
            tape: 0,
            function: "id".into(),
            args: vec![arg],
            next: m.final_label,
        });
        out.subroutines.insert("id".into(), identity());
    }
    prune_subroutines(&mut out);
    Ok(out)
}

/// The tape index in `M_G` of tape `t` of `m`: the oracle answer is read
/// from tape 2, so tapes from 2 on move up by one.
pub fn shifted(t: TapeIndex) -> TapeIndex {
    if t >= 2 {
        t + 1
    } else {
        t
    }
}

pub const ORACLE_TAPE: TapeIndex = 2;

fn shift_statement(s: &Statement) -> Statement {
    let mut s = s.clone();
    match &mut s {
        Statement::Right { tape, .. }
        | Statement::Left { tape, .. }
        | Statement::Write { tape, .. }
        | Statement::IfSymbol { tape, .. } => *tape = shifted(*tape),
        Statement::Assign { tape, args, .. } => {
            *tape = shifted(*tape);
            args.iter_mut().for_each(|a| *a = shifted(*a));
        }
        Statement::IfTest { args, .. } => args.iter_mut().for_each(|a| *a = shifted(*a)),
    }
    s
}

/// `M_G`: a second input tape (tape 2) holds the oracle answer, and every
/// `i := g(i₁) -> l'` becomes `i := id(2) -> l'`.
pub fn split_g(m: &Machine, g_id: &str) -> Result<Machine, SplitError> {
    let sites = sites(m, g_id)?;
    let mut answer: Option<CarrierId> = None;
    for (_, tape, _) in &sites {
        let c = &m.carriers[*tape];
        match &answer {
            Some(a) if a != c => return Err(SplitError::AnswerCarriers(a.clone(), c.clone())),
            _ => answer = Some(c.clone()),
        }
    }
    let mut out = m.clone();
    out.inputs = 2;
    out.carriers
        .insert(ORACLE_TAPE, answer.unwrap_or_else(|| m.carriers[0].clone()));
    out.statements = m
        .statements
        .iter()
        .map(|s| s.as_ref().map(shift_statement))
        .collect();
    for (label, tape, _) in sites {
        out.statements[label] = Some(Statement::Assign {
            tape: shifted(tape),
            function: "id".into(),
            args: vec![ORACLE_TAPE],
            next: m.statement(label).expect("call site").successors()[0],
        });
        out.subroutines.insert("id".into(), identity());
    }
    prune_subroutines(&mut out);
    Ok(out)
}

/// Both halves of the split.
#[derive(Clone, Debug)]
pub struct Split {
    pub h: Machine,
    pub g: Machine,
}

pub fn split(m: &Machine, g_id: &str) -> Result<Split, SplitError> {
    Ok(Split {
        h: split_h(m, g_id)?,
        g: split_g(m, g_id)?,
    })
}

/// A pseudo-random binary stream determined by `seed`.
pub fn seeded_stream(seed: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Stream::from_fn(move |_| if rng.gen_bool(0.5) { b'1' } else { b'0' })
}

fn outcome(m: &Machine, inputs: &[Value], max_steps: usize) -> Result<Option<Value>, String> {
    match run(m, inputs, std::iter::repeat(0), max_steps) {
        Ok(RunOutcome::Accepted { output, .. }) => Ok(Some(output)),
        Ok(RunOutcome::BudgetExceeded { steps }) => Err(format!("no result after {steps} steps")),
        Ok(_) => Ok(None),
        Err(e) => Err(e.to_string()),
    }
}

/// Checks `f_M(p) = f_{M_G}(p, h(f_{M_H}(p)))` on the first `demand`
/// symbols, where `M` calls `g_id` and `h` realizes it.
pub fn verify_reduction(
    m: &Machine,
    split: &Split,
    g_id: &str,
    h: &Subroutine,
    samples: &[Value],
    demand: usize,
    max_steps: usize,
) -> Vec<Verdict> {
    let mut bound = m.clone();
    bound.subroutines.insert(g_id.into(), h.clone());
    let Subroutine::Assign(hf) = h else {
        let reason = format!("`{}` is a test, the oracle must be an assignment", h.name());
        return samples
            .iter()
            .map(|_| Verdict::Inconclusive {
                reason: reason.clone(),
            })
            .collect();
    };
    samples
        .iter()
        .map(|p| {
            let check = || -> Result<Verdict, String> {
                let direct = outcome(&bound, std::slice::from_ref(p), max_steps)?;
                let Some(question) = outcome(&split.h, std::slice::from_ref(p), max_steps)? else {
                    return Ok(match direct {
                        None => Verdict::Verified {
                            precision: demand as u32,
                        },
                        Some(_) => Verdict::Refuted {
                            reason: "M_H has no result where M has one".into(),
                        },
                    });
                };
                // Off the oracle path the answer is never read.
                let answer = hf
                    .choose(std::slice::from_ref(&question), 0)
                    .unwrap_or(question);
                let composed = outcome(&split.g, &[p.clone(), answer], max_steps)?;
                Ok(match (direct, composed) {
                    (None, None) => Verdict::Verified {
                        precision: demand as u32,
                    },
                    (Some(a), Some(b)) if a.agrees_to(&b, demand) => Verdict::Verified {
                        precision: demand as u32,
                    },
                    (Some(a), Some(b)) => Verdict::Refuted {
                        reason: format!(
                            "M gives {}, the composition gives {}",
                            a.render(),
                            b.render()
                        ),
                    },
                    (Some(_), None) => Verdict::Refuted {
                        reason: "the composition has no result".into(),
                    },
                    (None, Some(_)) => Verdict::Refuted {
                        reason: "M has no result".into(),
                    },
                })
            };
            check().unwrap_or_else(|reason| Verdict::Inconclusive { reason })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use rand::SeedableRng;

    fn oracle(m: &str) -> &'static str {
        match m {
            "w_branch" => "stream.flip",
            _ => "stream.tail",
        }
    }

    #[test]
    fn single_use_examples() {
        assert!(check_single_use(&corpus::machine("w_post").unwrap(), "stream.tail").is_ok());
        assert!(check_single_use(&corpus::machine("w_two_sites").unwrap(), "stream.tail").is_ok());
        let e = check_single_use(&corpus::machine("w_twice").unwrap(), "stream.tail").unwrap_err();
        assert_eq!(e.path, vec!["first", "second"]);
        let e = check_single_use(&corpus::machine("w_loop").unwrap(), "stream.tail").unwrap_err();
        assert_eq!(e.path, vec!["ask", "again", "ask"]);
    }

    #[test]
    fn single_use_matches_path_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let m = corpus::random_machine(&mut rng, 8);
            for g in ["word.flip", "word.tail", "word.first_is_zero"] {
                let expected = single_use_by_paths(&m, g, 2 * m.labels.len());
                assert_eq!(
                    check_single_use(&m, g).is_ok(),
                    expected,
                    "{g}\n{}",
                    crate::dsl::render(&m)
                );
            }
        }
    }

    #[test]
    fn split_of_a_single_call_is_identity_and_copy() {
        let m = corpus::machine("w_post").unwrap();
        let mut ask_only = m.clone();
        ask_only.statements[0] = Some(Statement::Assign {
            tape: 0,
            function: "stream.tail".into(),
            args: vec![1],
            next: 2,
        });
        let h = split_h(&ask_only, "stream.tail").unwrap();
        assert_eq!(
            h.statements[0],
            Some(Statement::Assign {
                tape: 0,
                function: "id".into(),
                args: vec![1],
                next: 2
            })
        );
        let g = split_g(&ask_only, "stream.tail").unwrap();
        assert_eq!(
            g.statements[0],
            Some(Statement::Assign {
                tape: 0,
                function: "id".into(),
                args: vec![2],
                next: 2
            })
        );
        assert_eq!(g.inputs, 2);
        assert_eq!(g.tape_count(), 4);
    }

    #[test]
    fn splits_keep_labels_and_edges() {
        for name in ["w_post", "w_branch", "w_two_sites"] {
            let m = corpus::machine(name).unwrap();
            let s = split(&m, oracle(name)).unwrap();
            assert_eq!(s.g.labels, m.labels);
            assert_eq!(build_graph(&s.g).edges(), build_graph(&m).edges());
            assert_eq!(s.h.labels, m.labels);
            for (l, stmt) in s.h.statements.iter().enumerate() {
                if m.labels_using(oracle(name)).contains(&l) {
                    assert_eq!(stmt.as_ref().unwrap().successors(), vec![m.final_label]);
                } else {
                    assert_eq!(stmt, &m.statements[l]);
                }
            }
            for half in [&s.h, &s.g] {
                assert!(
                    crate::dsl::validate(half).iter().all(|d| !d.is_error()),
                    "{}",
                    crate::dsl::render(half)
                );
            }
        }
    }

    #[test]
    fn no_oracle_calls() {
        let m = corpus::machine("w_post").unwrap();
        let s = split(&m, "stream.nothing").unwrap();
        assert_eq!(s.h, m);
        let p = seeded_stream(1);
        let direct = outcome(&m, &[Value::Stream(p.clone())], 100)
            .unwrap()
            .unwrap();
        let anything = Value::Stream(seeded_stream(99));
        let via_g = outcome(&s.g, &[Value::Stream(p), anything], 100)
            .unwrap()
            .unwrap();
        assert!(direct.agrees_to(&via_g, 64));
    }

    #[test]
    fn preconditions() {
        let twice = corpus::machine("w_twice").unwrap();
        assert!(matches!(
            split_h(&twice, "stream.tail"),
            Err(SplitError::NotSingleUse(_))
        ));
        let adder = corpus::machine("stream_adder").unwrap();
        assert_eq!(
            split_g(&adder, "stream.sri_add").unwrap_err(),
            SplitError::Inputs(2)
        );
        let branch = corpus::machine("w_branch").unwrap();
        assert!(matches!(
            split_h(&branch, "stream.head_is_zero"),
            Err(SplitError::TestUse { .. })
        ));
    }

    #[test]
    fn reduction_identity_and_mutation() {
        let registry = Registry::standard();
        let samples: Vec<Value> = (0..30).map(|s| Value::Stream(seeded_stream(s))).collect();
        for name in ["w_post", "w_branch", "w_two_sites"] {
            let m = corpus::machine(name).unwrap();
            let g = oracle(name);
            let s = split(&m, g).unwrap();
            let h = registry.get(g).unwrap();
            let v = verify_reduction(&m, &s, g, h, &samples, 64, 1000);
            assert!(v.iter().all(Verdict::is_verified), "{name}: {v:?}");

            let mut broken = s.clone();
            for l in m.labels_using(g) {
                if let Some(Statement::Assign { args, .. }) = &mut broken.g.statements[l] {
                    args[0] = 1;
                }
            }
            let v = verify_reduction(&m, &broken, g, h, &samples, 64, 1000);
            assert!(
                v.iter().any(Verdict::is_refuted),
                "{name}: mutation survived"
            );
        }
    }
}
