use std::fmt;

use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use crate::exact::{Interval, Rational};
use crate::names::{IntervalSeq, Stream, Word};

/// Identifier of a carrier set `X_i`.
///
/// Builtin ids: `word`, `stream`, `nat`, `int`, `rat`, `real` (sampled at
/// rationals), `interval`, `sri` (interval sequences). `*` matches any
/// carrier in subroutine signatures. Every other id is an opaque carrier
/// whose values carry the id as their tag.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CarrierId(String);

impl CarrierId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn any() -> Self {
        Self("*".into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_any(&self) -> bool {
        self.0 == "*"
    }

    pub fn kind(&self) -> Option<Kind> {
        Some(match self.0.as_str() {
            "*" => return None,
            "word" => Kind::Word,
            "stream" => Kind::Stream,
            "nat" => Kind::Natural,
            "int" => Kind::Integer,
            "rat" | "real" => Kind::Rational,
            "interval" => Kind::Interval,
            "sri" => Kind::IntervalSeq,
            _ => Kind::Opaque,
        })
    }

    /// Whether a value with this carrier can stand where `other` is expected.
    pub fn compatible(&self, other: &CarrierId) -> bool {
        self.is_any() || other.is_any() || self == other
    }
}

impl fmt::Display for CarrierId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Kind {
    Word,
    Stream,
    Natural,
    Integer,
    Rational,
    Interval,
    IntervalSeq,
    Opaque,
}

/// An element of some carrier set.
#[derive(Clone, Debug)]
pub enum Value {
    Word(Word),
    Stream(Stream),
    Natural(BigUint),
    Integer(BigInt),
    Rational(Rational),
    Interval(Interval),
    IntervalSeq(IntervalSeq),
    Opaque { tag: String, payload: String },
}

impl Value {
    pub fn word(s: &str) -> Self {
        Value::Word(Word::from(s))
    }

    pub fn kind(&self) -> Kind {
        match self {
            Value::Word(_) => Kind::Word,
            Value::Stream(_) => Kind::Stream,
            Value::Natural(_) => Kind::Natural,
            Value::Integer(_) => Kind::Integer,
            Value::Rational(_) => Kind::Rational,
            Value::Interval(_) => Kind::Interval,
            Value::IntervalSeq(_) => Kind::IntervalSeq,
            Value::Opaque { .. } => Kind::Opaque,
        }
    }

    pub fn belongs_to(&self, carrier: &CarrierId) -> bool {
        match (carrier.kind(), self) {
            (None, _) => true,
            (Some(Kind::Opaque), Value::Opaque { tag, .. }) => tag == carrier.as_str(),
            (Some(k), v) => k == v.kind(),
        }
    }

    pub fn as_word(&self) -> Option<&Word> {
        match self {
            Value::Word(w) => Some(w),
            _ => None,
        }
    }

    pub fn as_stream(&self) -> Option<&Stream> {
        match self {
            Value::Stream(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Value::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_interval_seq(&self) -> Option<&IntervalSeq> {
        match self {
            Value::IntervalSeq(s) => Some(s),
            _ => None,
        }
    }

    /// Agreement up to `n` symbols for streams; plain equality otherwise.
    pub fn agrees_to(&self, other: &Value, n: usize) -> bool {
        match (self, other) {
            (Value::Stream(a), Value::Stream(b)) => a.prefix(n) == b.prefix(n),
            _ => self == other,
        }
    }

    /// Short human-readable rendering used in traces. Streams show the
    /// symbols they have been probed for, up to 32.
    pub fn render(&self) -> String {
        match self {
            Value::Word(w) => format!("\"{w}\""),
            Value::Stream(s) => format!("{s:?}"),
            Value::Natural(n) => n.to_string(),
            Value::Integer(z) => z.to_string(),
            Value::Rational(q) => q.to_string(),
            Value::Interval(i) => i.to_string(),
            Value::IntervalSeq(s) => format!("{s:?}"),
            Value::Opaque { tag, payload } => format!("{tag}:{payload}"),
        }
    }
}

/// Streams compare by decidable identity (shared memo cell or equal periodic
/// description); interval sequences by identity.
impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Word(a), Value::Word(b)) => a == b,
            (Value::Stream(a), Value::Stream(b)) => a.same_as(b),
            (Value::Natural(a), Value::Natural(b)) => a == b,
            (Value::Integer(a), Value::Integer(b)) => a == b,
            (Value::Rational(a), Value::Rational(b)) => a == b,
            (Value::Interval(a), Value::Interval(b)) => a == b,
            (Value::IntervalSeq(a), Value::IntervalSeq(b)) => a.same_as(b),
            (
                Value::Opaque {
                    tag: t1,
                    payload: p1,
                },
                Value::Opaque {
                    tag: t2,
                    payload: p2,
                },
            ) => t1 == t2 && p1 == p2,
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
