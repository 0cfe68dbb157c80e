//! The standard subroutine table. Machine sources refer to subroutines by
//! name; the DSL and the CLI resolve those names here.
//!
//! Naming scheme: `word.*` functions work on finite words and double as
//! generators for the `stream.*` function of the same suffix; `real.*`,
//! `rat.*` and `sri.*` work on abstract carriers.

use std::collections::BTreeMap;

use crate::exact::{Interval, Rational};
use crate::machine::{FnMulti, FnTest, Signature, Subroutine, Value};
use crate::names::{
    encode_interval_record, interval_from_blocks, interval_records, iota_decode_partial,
    IntervalSeq, Stream, Word,
};
use crate::type2gen::{FnClass, WordFunction};

#[derive(Clone, Debug, Default)]
pub struct Registry {
    entries: BTreeMap<String, Subroutine>,
    generators: BTreeMap<String, WordFunction>,
}

impl Registry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        for h in word_functions() {
            r.insert_generator(h);
        }
        for s in stream_functions().into_iter().chain(abstract_functions()) {
            r.insert(s);
        }
        r
    }

    pub fn get(&self, name: &str) -> Option<&Subroutine> {
        self.entries.get(name)
    }

    pub fn insert(&mut self, s: Subroutine) {
        self.entries.insert(s.name().to_string(), s);
    }

    /// Registers `h` as a generator and as a word-level subroutine: an
    /// assignment, or a test when `h` is monotone-constant.
    pub fn insert_generator(&mut self, h: WordFunction) {
        let sub = if h.class() == FnClass::MonotoneConstant {
            word_test(&h)
        } else {
            word_assign(&h)
        };
        self.insert(sub);
        self.generators.insert(h.name().to_string(), h);
    }

    pub fn generator(&self, name: &str) -> Option<&WordFunction> {
        self.generators.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Generator for every `stream.*` subroutine that has a `word.*` twin.
    pub fn default_generators(&self) -> BTreeMap<String, WordFunction> {
        self.entries
            .keys()
            .filter_map(|name| {
                let suffix = name.strip_prefix("stream.")?;
                let twin = match suffix {
                    "head_is_zero" => "word.first_is_zero".to_string(),
                    s => format!("word.{s}"),
                };
                Some((name.clone(), self.generators.get(&twin)?.clone()))
            })
            .collect()
    }
}

fn word_signature(arity: usize) -> Signature {
    Signature::new(&vec!["word"; arity], "word")
}

fn words(args: &[Value]) -> Option<Vec<Word>> {
    args.iter().map(|v| v.as_word().cloned()).collect()
}

/// `h` as a single-valued assignment on word carriers.
pub fn word_assign(h: &WordFunction) -> Subroutine {
    let f = h.clone();
    Subroutine::assign(FnMulti::single(
        h.name(),
        word_signature(h.arity()),
        move |args| f.eval(&words(args)?).map(Value::Word),
    ))
}

/// `h` as a test on word carriers; values other than `0`, `1` block the machine.
pub fn word_test(h: &WordFunction) -> Subroutine {
    let f = h.clone();
    let inputs = vec!["word"; h.arity()];
    Subroutine::test(FnTest::new(h.name(), &inputs, move |args| {
        f.eval(&words(args)?)
    }))
}

fn map_symbols(w: &Word, f: impl Fn(u8) -> u8) -> Word {
    Word::new(w.symbols().iter().map(|s| f(*s)).collect())
}

fn flip(s: u8) -> u8 {
    match s {
        b'0' => b'1',
        b'1' => b'0',
        other => other,
    }
}

fn xor(a: u8, b: u8) -> u8 {
    if a == b {
        b'0'
    } else {
        b'1'
    }
}

/// The interval records completely contained in a finite prefix of a name.
pub fn complete_intervals(w: &Word) -> Vec<Interval> {
    let (blocks, _) = iota_decode_partial(w);
    blocks
        .chunks_exact(6)
        .enumerate()
        .map_while(|(i, six)| interval_from_blocks(six, i + 1).ok())
        .collect()
}

pub fn word_functions() -> Vec<WordFunction> {
    use FnClass::*;
    vec![
        WordFunction::new("word.id", 1, Monotone, |a| Some(a[0].clone())),
        WordFunction::new("word.flip", 1, Monotone, |a| Some(map_symbols(&a[0], flip))),
        WordFunction::new("word.tail", 1, Monotone, |a| {
            Some(Word::new(
                a[0].symbols().get(1..).unwrap_or_default().to_vec(),
            ))
        }),
        WordFunction::new("word.drop_last", 1, Monotone, |a| {
            Some(a[0].truncated(a[0].len().saturating_sub(1)))
        }),
        WordFunction::new("word.double", 1, Monotone, |a| {
            Some(Word::new(
                a[0].symbols().iter().flat_map(|s| [*s, *s]).collect(),
            ))
        }),
        WordFunction::new("word.const11", 1, Monotone, |_| Some(Word::from("11"))),
        WordFunction::new("word.interleave", 2, Monotone, |a| {
            let (u, v) = (a[0].symbols(), a[1].symbols());
            Some(Word::new(
                u.iter().zip(v).flat_map(|(x, y)| [*x, *y]).collect(),
            ))
        }),
        WordFunction::new("word.xor", 2, Monotone, |a| {
            let (u, v) = (a[0].symbols(), a[1].symbols());
            Some(Word::new(
                u.iter().zip(v).map(|(x, y)| xor(*x, *y)).collect(),
            ))
        }),
        WordFunction::new("word.sri_add", 2, Monotone, |a| {
            let (x, y) = (complete_intervals(&a[0]), complete_intervals(&a[1]));
            let mut out = Word::empty();
            for (i, j) in x.iter().zip(&y) {
                out.extend_from(&encode_interval_record(&i.add(j)));
            }
            Some(out)
        }),
        WordFunction::new("word.first_is_zero", 1, MonotoneConstant, |a| {
            match a[0].symbols().first() {
                Some(b'0') => Some(Word::from("0")),
                Some(_) => Some(Word::from("1")),
                None => None,
            }
        }),
    ]
}

fn stream_arg(args: &[Value], i: usize) -> Option<Stream> {
    args.get(i)?.as_stream().cloned()
}

fn stream_unary(name: &str, f: impl Fn(Stream) -> Stream + Send + Sync + 'static) -> Subroutine {
    Subroutine::assign(FnMulti::single(
        name,
        Signature::new(&["stream"], "stream"),
        move |args| Some(Value::Stream(f(stream_arg(args, 0)?))),
    ))
}

fn stream_binary(
    name: &str,
    f: impl Fn(Stream, Stream) -> Stream + Send + Sync + 'static,
) -> Subroutine {
    Subroutine::assign(FnMulti::single(
        name,
        Signature::new(&["stream", "stream"], "stream"),
        move |args| Some(Value::Stream(f(stream_arg(args, 0)?, stream_arg(args, 1)?))),
    ))
}

/// Adds two interval sequences read off binary names and re-encodes the sum.
pub fn sri_add_streams(a: &Stream, b: &Stream) -> Stream {
    interval_records(a).add(&interval_records(b)).to_stream()
}

pub fn stream_functions() -> Vec<Subroutine> {
    vec![
        stream_unary("stream.id", |s| s),
        stream_unary("stream.flip", |s| {
            Stream::from_fn(move |i| flip(s.symbol(i)))
        }),
        stream_unary("stream.tail", |s| Stream::from_fn(move |i| s.symbol(i + 1))),
        stream_binary("stream.interleave", |a, b| {
            Stream::from_fn(move |i| {
                if i % 2 == 0 {
                    a.symbol(i / 2)
                } else {
                    b.symbol(i / 2)
                }
            })
        }),
        stream_binary("stream.xor", |a, b| {
            Stream::from_fn(move |i| xor(a.symbol(i), b.symbol(i)))
        }),
        stream_binary("stream.sri_add", |a, b| sri_add_streams(&a, &b)),
        // Moves every sum interval up by its own width, so the sum drops out.
        stream_binary("stream.sri_add_skewed", |a, b| {
            let sum = interval_records(&a).add(&interval_records(&b));
            IntervalSeq::from_results(move |n| {
                let i = sum.get(n)?;
                let w = i.width();
                Ok(Interval {
                    lo: &i.lo + &w,
                    hi: &i.hi + &w,
                })
            })
            .to_stream()
        }),
        Subroutine::test(FnTest::new("stream.head_is_zero", &["stream"], |args| {
            let s = stream_arg(args, 0)?;
            Some(Word::from(if s.symbol(0) == b'0' { "0" } else { "1" }))
        })),
    ]
}

fn rational_args(args: &[Value]) -> Option<(Rational, Rational)> {
    Some((
        args.first()?.as_rational()?.clone(),
        args.get(1)?.as_rational()?.clone(),
    ))
}

pub fn abstract_functions() -> Vec<Subroutine> {
    vec![
        Subroutine::assign(FnMulti::single("id", Signature::new(&["*"], "*"), |args| {
            args.first().cloned()
        })),
        Subroutine::assign(FnMulti::finite("coin", Signature::new(&[], "word"), |_| {
            vec![Value::word("0"), Value::word("1")]
        })),
        Subroutine::assign(FnMulti::single(
            "real.add",
            Signature::new(&["real", "real"], "real"),
            |args| {
                let (x, y) = rational_args(args)?;
                Some(Value::Rational(x + y))
            },
        )),
        Subroutine::assign(FnMulti::single(
            "rat.add",
            Signature::new(&["rat", "rat"], "rat"),
            |args| {
                let (x, y) = rational_args(args)?;
                Some(Value::Rational(x + y))
            },
        )),
        Subroutine::assign(FnMulti::single(
            "sri.add",
            Signature::new(&["sri", "sri"], "sri"),
            |args| {
                let a = args.first()?.as_interval_seq()?;
                let b = args.get(1)?.as_interval_seq()?;
                Some(Value::IntervalSeq(a.add(b)))
            },
        )),
        Subroutine::test(FnTest::new("test.never", &["*"], |_| None)),
    ]
}
