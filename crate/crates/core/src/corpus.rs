//! Fixture machines shipped with the library, and a generator of random
//! valid machines.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::builtins::Registry;
use crate::dsl::{self, Diagnostic};
use crate::machine::{CarrierId, Machine, Statement};

macro_rules! fixtures {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/", $name, ".gtm")))),*]
    };
}

/// Valid fixtures as `(name, source)`.
pub const MACHINES: &[(&str, &str)] = fixtures![
    "coin",
    "coin_loop",
    "copy_word",
    "never",
    "spin",
    "symbols",
    "mono_copy",
    "mono_flip_trim",
    "mono_branch",
    "mono_adder",
    "const11",
    "stream_adder",
    "real_adder",
    "w_post",
    "w_branch",
    "w_two_sites",
    "w_twice",
    "w_loop",
];

/// Fixtures that must be rejected.
pub const MALFORMED: &[(&str, &str)] = fixtures![
    "bad_unknown_label",
    "bad_total",
    "bad_gamma",
    "bad_syntax",
    "bad_fn",
    "bad_arity",
    "bad_tape",
];

pub const REAL_ADDER_REALIZERS: &str = include_str!("../fixtures/real_adder.toml");
pub const REAL_ADDER_BROKEN_REALIZERS: &str = include_str!("../fixtures/real_adder_broken.toml");

/// Source of a fixture by name, valid or malformed.
pub fn source(name: &str) -> Option<&'static str> {
    MACHINES
        .iter()
        .chain(MALFORMED)
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
}

/// Parses a valid fixture against the standard registry.
pub fn machine(name: &str) -> Result<Machine, Vec<Diagnostic>> {
    let src = source(name).unwrap_or_else(|| panic!("no fixture named `{name}`"));
    dsl::parse(src, &Registry::standard()).map(|p| p.machine)
}

const LABEL_STEMS: &[&str] = &["l", "go", "q", "s.x", "loop_"];
const WORD_ASSIGNS: &[&str] = &[
    "id",
    "word.id",
    "word.flip",
    "word.tail",
    "word.drop_last",
    "word.double",
    "word.const11",
    "word.interleave",
    "word.xor",
    "word.sri_add",
];

/// A random machine over word carriers that passes validation (it may have
/// unreachable labels). Has between 1 and `max_labels` labels.
pub fn random_machine(rng: &mut impl Rng, max_labels: usize) -> Machine {
    let registry = Registry::standard();
    let n = rng.gen_range(1..=max_labels.max(1));
    let stem = LABEL_STEMS.choose(rng).unwrap();
    let labels: Vec<String> = (0..n).map(|i| format!("{stem}{i}")).collect();
    let final_label = if n > 1 && rng.gen_bool(0.9) {
        rng.gen_range(1..n)
    } else {
        rng.gen_range(0..n)
    };
    let tape_count = rng.gen_range(1..=4);
    let inputs = rng.gen_range(0..tape_count);
    let blank = *['_', 'b', '.'].choose(rng).unwrap();
    let mut gamma = vec![blank];
    for c in ['#', '$', '%'] {
        if rng.gen_bool(0.5) {
            gamma.push(c);
        }
    }
    if rng.gen_bool(0.3) {
        gamma.shuffle(rng);
    }
    let tape = |rng: &mut _| Rng::gen_range(rng, 0..tape_count);
    let mut subroutines = BTreeMap::new();
    let statements = (0..n)
        .map(|l| {
            if l == final_label {
                return None;
            }
            let next = rng.gen_range(0..n);
            let other = rng.gen_range(0..n);
            Some(match rng.gen_range(0..6) {
                0 => Statement::Right {
                    tape: tape(rng),
                    next,
                },
                1 => Statement::Left {
                    tape: tape(rng),
                    next,
                },
                2 => Statement::Write {
                    tape: tape(rng),
                    symbol: *gamma.choose(rng).unwrap(),
                    next,
                },
                3 => Statement::IfSymbol {
                    tape: tape(rng),
                    symbol: *gamma.choose(rng).unwrap(),
                    then: next,
                    otherwise: other,
                },
                4 => {
                    let function = WORD_ASSIGNS.choose(rng).unwrap().to_string();
                    let sub = registry.get(&function).expect("registered").clone();
                    let args = (0..sub.signature().arity()).map(|_| tape(rng)).collect();
                    subroutines.insert(function.clone(), sub);
                    Statement::Assign {
                        tape: tape(rng),
                        function,
                        args,
                        next,
                    }
                }
                _ => {
                    let function = "word.first_is_zero".to_string();
                    subroutines.insert(
                        function.clone(),
                        registry.get(&function).expect("registered").clone(),
                    );
                    Statement::IfTest {
                        function,
                        args: vec![tape(rng)],
                        then: next,
                        otherwise: other,
                    }
                }
            })
        })
        .collect();
    Machine {
        name: format!("random{}", rng.gen_range(0..1000)),
        labels,
        final_label,
        gamma,
        blank,
        inputs,
        carriers: vec![CarrierId::new("word"); tape_count],
        statements,
        subroutines,
    }
}
