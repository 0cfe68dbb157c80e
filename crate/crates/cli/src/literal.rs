//! Input literals: `KIND:TEXT`, or bare text read according to the carrier
//! of the tape it goes to.
//!
//! | kind | text | value |
//! |------|------|-------|
//! | `word` | symbols | finite word |
//! | `stream` | `U(V)` or `U` | `U V V V …`, or `U 0 0 0 …` |
//! | `beta` | binary word | `β`-name of the word |
//! | `rho` | rational | canonical binary name of the rational |
//! | `sri` | rational | interval sequence `[x − 2^-n; x + 2^-n]` |
//! | `nat`, `int` | decimal | number |
//! | `rat`, `real` | `p/q`, `p` or decimal | rational |
//! | `interval` | `a,b` | rational interval |

use gtm_core::exact::{parse_rational, Interval, Rational};
use gtm_core::machine::{CarrierId, Kind, Value};
use gtm_core::names::{beta_encode, Stream, Word};
use gtm_core::represent::{rho_encode, rho_intervals};
use num_bigint::{BigInt, BigUint};

pub fn rational(text: &str) -> Result<Rational, String> {
    parse_rational(text).ok_or_else(|| format!("`{text}` is not a rational number"))
}

fn stream(text: &str) -> Result<Stream, String> {
    match text.split_once('(') {
        Some((prefix, rest)) => {
            let cycle = rest
                .strip_suffix(')')
                .ok_or_else(|| format!("`{text}`: missing `)`"))?;
            if cycle.is_empty() {
                return Err(format!("`{text}`: the repeated part must be nonempty"));
            }
            Ok(Stream::periodic(Word::from(prefix), Word::from(cycle)))
        }
        None => Ok(Stream::zero_padded(Word::from(text))),
    }
}

fn parse_kind(kind: &str, text: &str) -> Result<Value, String> {
    Ok(match kind {
        "word" => Value::Word(Word::from(text)),
        "stream" => Value::Stream(stream(text)?),
        "beta" => Value::Stream(beta_encode(&Word::from(text)).map_err(|e| e.to_string())?),
        "rho" => Value::Stream(rho_encode(&rational(text)?)),
        "sri" => Value::IntervalSeq(rho_intervals(rational(text)?)),
        "nat" => Value::Natural(
            text.parse::<BigUint>()
                .map_err(|_| format!("`{text}` is not a natural number"))?,
        ),
        "int" => Value::Integer(
            text.parse::<BigInt>()
                .map_err(|_| format!("`{text}` is not an integer"))?,
        ),
        "rat" | "real" => Value::Rational(rational(text)?),
        "interval" => {
            let (a, b) = text
                .split_once(',')
                .ok_or_else(|| format!("`{text}`: expected `a,b`"))?;
            let i = Interval::new(rational(a)?, rational(b)?)
                .ok_or_else(|| format!("`{text}`: empty interval"))?;
            Value::Interval(i)
        }
        other => return Err(format!("unknown literal kind `{other}`")),
    })
}

const KINDS: &[&str] = &[
    "word", "stream", "beta", "rho", "sri", "nat", "int", "rat", "real", "interval",
];

/// Parses `text` for a tape holding `carrier`.
pub fn parse(text: &str, carrier: &CarrierId) -> Result<Value, String> {
    if let Some((kind, rest)) = text.split_once(':') {
        if KINDS.contains(&kind) {
            return parse_kind(kind, rest);
        }
    }
    let kind = match carrier.kind() {
        Some(Kind::Word) | None => "word",
        Some(Kind::Stream) => "stream",
        Some(Kind::Natural) => "nat",
        Some(Kind::Integer) => "int",
        Some(Kind::Rational) => "rat",
        Some(Kind::Interval) => "interval",
        Some(Kind::IntervalSeq) => "sri",
        Some(Kind::Opaque) => {
            return Ok(Value::Opaque {
                tag: carrier.to_string(),
                payload: text.into(),
            })
        }
    };
    parse_kind(kind, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        let any = CarrierId::any();
        assert_eq!(parse("word:01", &any).unwrap(), Value::word("01"));
        assert_eq!(
            parse("01", &CarrierId::new("word")).unwrap(),
            Value::word("01")
        );
        assert_eq!(
            parse("1/3", &CarrierId::new("real")).unwrap(),
            Value::Rational(Rational::new(1.into(), 3.into()))
        );
        let Value::Stream(s) = parse("stream:1(01)", &any).unwrap() else {
            panic!()
        };
        assert_eq!(s.prefix(6), Word::from("101010"));
        let Value::Stream(s) = parse("11", &CarrierId::new("stream")).unwrap() else {
            panic!()
        };
        assert_eq!(s.prefix(4), Word::from("1100"));
        assert!(parse("interval:1,0", &any).is_err());
        assert!(parse("nat:x", &any).is_err());
    }
}
