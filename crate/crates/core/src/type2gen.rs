//! Monotone word functions and the stream functions they generate.
//!
//! A monotone `h` generates `T_ω(h)(x) = sup{ h(y) | y ⊑ x, h(y)↓ }`; a
//! monotone-constant `h` generates `T_*(h)(x) = h(y)` for any defined
//! `y ⊑ x`. Both are evaluated here on the prefixes `x^{<e}` for
//! `e = 0, 1, 2, …` up to a probe limit, and the class hypothesis is checked
//! at every probed point.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::names::{stream_prefix, Stream, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FnClass {
    Monotone,
    MonotoneConstant,
    Unconstrained,
}

type WordFn = dyn Fn(&[Word]) -> Option<Word> + Send + Sync;

/// A partial function `(Σ*)^k → Σ*` with a declared class.
#[derive(Clone)]
pub struct WordFunction {
    name: String,
    arity: usize,
    class: FnClass,
    eval: Arc<WordFn>,
}

impl WordFunction {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        class: FnClass,
        eval: impl Fn(&[Word]) -> Option<Word> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            arity,
            class,
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn class(&self) -> FnClass {
        self.class
    }

    pub fn eval(&self, args: &[Word]) -> Option<Word> {
        assert_eq!(
            args.len(),
            self.arity,
            "arity mismatch calling `{}`",
            self.name
        );
        (self.eval)(args)
    }
}

impl fmt::Debug for WordFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "WordFunction({}/{}, {:?})",
            self.name, self.arity, self.class
        )
    }
}

/// A pair `y ⊑ y'` at which the declared class fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub shorter: Vec<Word>,
    pub longer: Vec<Word>,
    pub shorter_value: Word,
    pub longer_value: Option<Word>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "h({:?}) = {:?} but h({:?}) = {:?}",
            self.shorter, self.shorter_value, self.longer, self.longer_value
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("`{function}` is declared {class:?} but {violation}")]
pub struct ClassViolation {
    pub function: String,
    pub class: FnClass,
    pub violation: Violation,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct MonotonicityReport {
    pub samples: usize,
    pub violations: Vec<Violation>,
}

impl MonotonicityReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn classify(class: FnClass, shorter: &Word, longer: Option<&Word>) -> bool {
    match (class, longer) {
        (FnClass::Unconstrained, _) => true,
        (_, None) => false,
        (FnClass::Monotone, Some(l)) => shorter.is_prefix_of(l),
        (FnClass::MonotoneConstant, Some(l)) => shorter == l,
    }
}

fn check_pair(h: &WordFunction, y: &[Word], y2: &[Word]) -> Option<Violation> {
    let v = h.eval(y)?;
    let v2 = h.eval(y2);
    (!classify(h.class, &v, v2.as_ref())).then(|| Violation {
        shorter: y.to_vec(),
        longer: y2.to_vec(),
        shorter_value: v,
        longer_value: v2,
    })
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::new(
        (0..len)
            .map(|_| if rng.gen() { b'1' } else { b'0' })
            .collect(),
    )
}

/// Spot-checks the declared class on random pairs `y ⊑ y'` with components of
/// length at most `max_len`.
pub fn check_monotone_on_samples(
    h: &WordFunction,
    sample_budget: usize,
    max_len: usize,
    seed: u64,
) -> MonotonicityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = MonotonicityReport::default();
    for _ in 0..sample_budget {
        let longer: Vec<Word> = (0..h.arity)
            .map(|_| random_word(&mut rng, max_len))
            .collect();
        let shorter: Vec<Word> = longer
            .iter()
            .map(|w| w.truncated(rng.gen_range(0..=w.len())))
            .collect();
        report.samples += 1;
        if let Some(v) = check_pair(h, &shorter, &longer) {
            report.violations.push(v);
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StarVerdict {
    /// `T_*(h)(x)`, first defined at prefix length `at`.
    Value {
        word: Word,
        at: usize,
    },
    Diverge {
        probed: usize,
    },
}

/// `T_*(h)(x)` by probing `x^{<e}` for `e = 0..=probe_limit`. Once a value is
/// found, the next prefix is probed as well to check constancy.
pub fn t_star(
    h: &WordFunction,
    x: &[Stream],
    probe_limit: usize,
) -> Result<StarVerdict, ClassViolation> {
    for e in 0..=probe_limit {
        let y = stream_prefix(x, e);
        if let Some(w) = h.eval(&y) {
            let y2 = stream_prefix(x, e + 1);
            let w2 = h.eval(&y2);
            if w2.as_ref() != Some(&w) {
                return Err(ClassViolation {
                    function: h.name.clone(),
                    class: FnClass::MonotoneConstant,
                    violation: Violation {
                        shorter: y,
                        longer: y2,
                        shorter_value: w,
                        longer_value: w2,
                    },
                });
            }
            return Ok(StarVerdict::Value { word: w, at: e });
        }
    }
    Ok(StarVerdict::Diverge {
        probed: probe_limit + 1,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum OmegaVerdict {
    /// A chain element of length at least the demand, reached at prefix length `at`.
    Output {
        word: Word,
        at: usize,
    },
    InsufficientOutput {
        best: Option<Word>,
        probed: usize,
    },
}

/// Approximates `T_ω(h)(x)` to at least `demand` symbols.
pub fn t_omega(
    h: &WordFunction,
    x: &[Stream],
    demand: usize,
    probe_limit: usize,
) -> Result<OmegaVerdict, ClassViolation> {
    let mut previous: Option<(Vec<Word>, Word)> = None;
    for e in 0..=probe_limit {
        let y = stream_prefix(x, e);
        let value = h.eval(&y);
        if let Some((py, pv)) = &previous {
            let ok = value.as_ref().is_some_and(|v| pv.is_prefix_of(v));
            if !ok {
                return Err(ClassViolation {
                    function: h.name.clone(),
                    class: FnClass::Monotone,
                    violation: Violation {
                        shorter: py.clone(),
                        longer: y,
                        shorter_value: pv.clone(),
                        longer_value: value,
                    },
                });
            }
        }
        if let Some(v) = value {
            if v.len() >= demand {
                return Ok(OmegaVerdict::Output { word: v, at: e });
            }
            previous = Some((y, v));
        }
    }
    Ok(OmegaVerdict::InsufficientOutput {
        best: previous.map(|(_, v)| v),
        probed: probe_limit + 1,
    })
}
