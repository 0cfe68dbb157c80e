//! Canonical binary names for ℕ, ℤ, ℚ, rational intervals, and interval
//! sequences.
//!
//! * natural: binary, most significant bit first, no leading zeros (`0` for zero)
//! * integer: one sign symbol (`0` for ≥ 0, `1` for < 0) followed by `|z|` as a natural
//! * rational `p/q` in lowest terms: `ι(sign)·ι(bin|p|)·ι(bin q)`
//! * interval `[a;b]` with `a < b`: the three blocks of `a` then the three of `b`
//! * interval sequence: the concatenation of interval records

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, Zero};

use super::{iota_decode_stream, iota_encode, LazySeq, NameError, Stream, Word};
use crate::exact::{Interval, Rational};

pub fn encode_natural(n: &BigUint) -> Word {
    Word::new(n.to_str_radix(2).into_bytes())
}

pub fn decode_natural(w: &Word) -> Result<BigUint, NameError> {
    let s = w.symbols();
    if s.is_empty() {
        return Err(NameError::NotAName("empty natural".into()));
    }
    if s.len() > 1 && s[0] == b'0' {
        return Err(NameError::NotAName("leading zero in natural".into()));
    }
    if let Some(offset) = s.iter().position(|c| *c != b'0' && *c != b'1') {
        return Err(NameError::NotBinary { offset });
    }
    Ok(BigUint::parse_bytes(s, 2).expect("validated binary digits"))
}

pub fn encode_integer(z: &BigInt) -> Word {
    let mut out = Word::from(if z.is_negative() { "1" } else { "0" });
    out.extend_from(&encode_natural(z.magnitude()));
    out
}

pub fn decode_integer(w: &Word) -> Result<BigInt, NameError> {
    let Some((&sign, rest)) = w.symbols().split_first() else {
        return Err(NameError::NotAName("empty integer".into()));
    };
    let mag = decode_natural(&Word::new(rest.to_vec())).map_err(|e| match e {
        NameError::NotBinary { offset } => NameError::NotBinary { offset: offset + 1 },
        other => other,
    })?;
    match sign {
        b'0' => Ok(BigInt::from_biguint(Sign::Plus, mag)),
        b'1' if mag.is_zero() => Err(NameError::NotAName("negative zero".into())),
        b'1' => Ok(BigInt::from_biguint(Sign::Minus, mag)),
        _ => Err(NameError::NotBinary { offset: 0 }),
    }
}

fn rational_blocks(x: &Rational) -> [Word; 3] {
    let sign = Word::from(if x.is_negative() { "1" } else { "0" });
    [
        sign,
        encode_natural(x.numer().magnitude()),
        encode_natural(x.denom().magnitude()),
    ]
}

pub fn encode_rational_record(x: &Rational) -> Word {
    let mut out = Word::empty();
    for b in rational_blocks(x) {
        out.extend_from(&iota_encode(&b).expect("binary block"));
    }
    out
}

fn rational_from_blocks(blocks: &[Word], record: usize) -> Result<Rational, NameError> {
    let bad = |reason: String| NameError::MalformedRecord { record, reason };
    let negative = match blocks[0].symbols() {
        b"0" => false,
        b"1" => true,
        _ => return Err(bad("sign block must be 0 or 1".into())),
    };
    let p = decode_natural(&blocks[1]).map_err(|e| bad(format!("numerator: {e}")))?;
    let q = decode_natural(&blocks[2]).map_err(|e| bad(format!("denominator: {e}")))?;
    if q.is_zero() {
        return Err(bad("zero denominator".into()));
    }
    if negative && p.is_zero() {
        return Err(bad("negative zero".into()));
    }
    let p = BigInt::from_biguint(if negative { Sign::Minus } else { Sign::Plus }, p);
    let q = BigInt::from(q);
    let x = Rational::new_raw(p.clone(), q.clone());
    let reduced = Rational::new(p, q);
    if x.numer() != reduced.numer() || x.denom() != reduced.denom() {
        return Err(bad("rational not in lowest terms".into()));
    }
    Ok(reduced)
}

/// Decodes a word holding exactly one rational record.
pub fn decode_rational_record(w: &Word) -> Result<Rational, NameError> {
    let (blocks, used) = super::iota_decode_prefix(w)?;
    if blocks.len() != 3 || used != w.len() {
        return Err(NameError::MalformedRecord {
            record: 1,
            reason: format!(
                "expected exactly 3 blocks, found {} (+{} stray symbols)",
                blocks.len(),
                w.len() - used
            ),
        });
    }
    rational_from_blocks(&blocks, 1)
}

pub fn encode_interval_record(i: &Interval) -> Word {
    assert!(i.is_proper(), "interval records need lo < hi");
    encode_rational_record(&i.lo).concat(&encode_rational_record(&i.hi))
}

/// Builds an interval from six decoded blocks. `record` is 1-based.
pub fn interval_from_blocks(blocks: &[Word], record: usize) -> Result<Interval, NameError> {
    let lo = rational_from_blocks(&blocks[..3], record)?;
    let hi = rational_from_blocks(&blocks[3..6], record)?;
    if lo >= hi {
        return Err(NameError::MalformedRecord {
            record,
            reason: format!("endpoints {lo} and {hi} are not increasing"),
        });
    }
    Ok(Interval { lo, hi })
}

/// Decodes a word holding exactly one interval record.
pub fn decode_interval_record(w: &Word) -> Result<Interval, NameError> {
    let (blocks, used) = super::iota_decode_prefix(w)?;
    if blocks.len() != 6 || used != w.len() {
        return Err(NameError::MalformedRecord {
            record: 1,
            reason: format!("expected exactly 6 blocks, found {}", blocks.len()),
        });
    }
    interval_from_blocks(&blocks, 1)
}

/// The binary name of the interval sequence `next(0), next(1), …`.
pub fn interval_stream(mut next: impl FnMut(usize) -> Interval + Send + 'static) -> Stream {
    let mut n = 0;
    Stream::from_chunks(move || {
        let w = encode_interval_record(&next(n));
        n += 1;
        w
    })
}

/// A lazily materialized sequence of rational intervals (an element of SRI).
/// Entries are fallible because the sequence may be read off a binary name.
#[derive(Clone)]
pub struct IntervalSeq {
    seq: Arc<LazySeq<Result<Interval, NameError>>>,
}

impl IntervalSeq {
    pub fn from_fn(mut f: impl FnMut(usize) -> Interval + Send + 'static) -> Self {
        Self {
            seq: Arc::new(LazySeq::from_fn(move |i| Ok(f(i)))),
        }
    }

    pub fn from_results(
        f: impl FnMut(usize) -> Result<Interval, NameError> + Send + 'static,
    ) -> Self {
        Self {
            seq: Arc::new(LazySeq::from_fn(f)),
        }
    }

    /// The `n`-th interval (0-based).
    pub fn get(&self, n: usize) -> Result<Interval, NameError> {
        self.seq.get(n)
    }

    pub fn take(&self, n: usize) -> Result<Vec<Interval>, NameError> {
        self.seq.take(n).into_iter().collect()
    }

    pub fn same_as(&self, other: &IntervalSeq) -> bool {
        Arc::ptr_eq(&self.seq, &other.seq)
    }

    /// Componentwise interval sum. Errors in either operand propagate.
    pub fn add(&self, other: &IntervalSeq) -> IntervalSeq {
        let (a, b) = (self.clone(), other.clone());
        IntervalSeq::from_results(move |n| Ok(a.get(n)?.add(&b.get(n)?)))
    }

    /// The canonical binary name of this sequence. A decoding error in the
    /// sequence turns the rest of the name into `0^ω`, which is not a block.
    pub fn to_stream(&self) -> Stream {
        let seq = self.clone();
        let mut n = 0;
        let mut poisoned = false;
        Stream::from_chunks(move || {
            if poisoned {
                return Word::from("0000000000000000");
            }
            let out = match seq.get(n) {
                Ok(i) => encode_interval_record(&i),
                Err(_) => {
                    poisoned = true;
                    Word::from("0")
                }
            };
            n += 1;
            out
        })
    }
}

impl fmt::Debug for IntervalSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntervalSeq(cached {})", self.seq.cached_len())
    }
}

/// Reads the interval records off a binary name, lazily.
pub fn interval_records(p: &Stream) -> IntervalSeq {
    let mut blocks = iota_decode_stream(p);
    let mut failed: Option<NameError> = None;
    let mut record = 0usize;
    IntervalSeq::from_results(move |_| {
        if let Some(e) = &failed {
            return Err(e.clone());
        }
        record += 1;
        let mut six = Vec::with_capacity(6);
        for _ in 0..6 {
            match blocks.next().expect("block iterator on an infinite stream") {
                Ok(b) => six.push(b),
                Err(e) => {
                    let e = NameError::MalformedRecord {
                        record,
                        reason: e.to_string(),
                    };
                    failed = Some(e.clone());
                    return Err(e);
                }
            }
        }
        interval_from_blocks(&six, record).inspect_err(|e| failed = Some(e.clone()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn natural_and_integer_formats() {
        assert_eq!(encode_natural(&BigUint::from(0u32)), Word::from("0"));
        assert_eq!(encode_natural(&BigUint::from(6u32)), Word::from("110"));
        assert_eq!(encode_integer(&BigInt::from(-5)), Word::from("1101"));
        assert_eq!(encode_integer(&BigInt::from(0)), Word::from("00"));
        assert!(decode_natural(&Word::from("01")).is_err());
        assert!(decode_integer(&Word::from("10")).is_err());
        assert_eq!(
            decode_integer(&Word::from("1101")).unwrap(),
            BigInt::from(-5)
        );
    }

    #[test]
    fn rational_record_layout() {
        // -1/2 -> ι(1) ι(1) ι(10)
        let w = encode_rational_record(&rat(-1, 2));
        assert_eq!(
            w,
            Word::from("1101011 1101011 110100011".replace(' ', "").as_str())
        );
        assert_eq!(decode_rational_record(&w).unwrap(), rat(-1, 2));
    }

    #[test]
    fn unreduced_and_degenerate_records_are_rejected() {
        let unreduced = [Word::from("0"), Word::from("10"), Word::from("100")];
        let mut w = Word::empty();
        for b in &unreduced {
            w.extend_from(&iota_encode(b).unwrap());
        }
        assert!(decode_rational_record(&w).is_err());

        let point = encode_rational_record(&int(1)).concat(&encode_rational_record(&int(1)));
        assert!(decode_interval_record(&point).is_err());
    }

    #[test]
    fn interval_records_are_read_lazily_and_in_order() {
        let s = interval_stream(|n| Interval::ball(&rat(1, 3), &crate::exact::pow2_neg(n as u32)));
        let seq = interval_records(&s);
        assert_eq!(
            seq.get(2).unwrap(),
            Interval::new(rat(1, 12), rat(7, 12)).unwrap()
        );
        assert_eq!(
            seq.get(0).unwrap(),
            Interval::new(rat(-2, 3), rat(4, 3)).unwrap()
        );
    }

    #[test]
    fn malformed_record_reports_its_number() {
        let good = encode_interval_record(&Interval::new(int(0), int(1)).unwrap());
        let s = Stream::zero_padded(good);
        let seq = interval_records(&s);
        assert!(seq.get(0).is_ok());
        assert!(matches!(
            seq.get(1),
            Err(NameError::MalformedRecord { record: 2, .. })
        ));
        assert!(seq.get(5).is_err());
    }

    fn rational_strategy() -> impl Strategy<Value = Rational> {
        (any::<i64>(), 1i64..i64::MAX).prop_map(|(p, q)| rat(p, q))
    }

    proptest! {
        #[test]
        fn rational_codec_round_trips(x in rational_strategy()) {
            prop_assert_eq!(decode_rational_record(&encode_rational_record(&x)).unwrap(), x);
        }

        #[test]
        fn interval_codec_round_trips(a in rational_strategy(), b in rational_strategy()) {
            prop_assume!(a != b);
            let i = if a < b { Interval::new(a, b) } else { Interval::new(b, a) }.unwrap();
            prop_assert_eq!(decode_interval_record(&encode_interval_record(&i)).unwrap(), i);
        }
    }
}
