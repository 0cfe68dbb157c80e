//! Naming relations `δ: names ⇉ objects` and their composition
//! `z ∈ δ⊙γ(x) ⟺ ∃y. y ∈ γ(x) ∧ z ∈ δ(y)`.
//!
//! Validity of an infinite name is only semidecidable, so membership is
//! checked at a precision `d` with a probe budget and answers
//! consistent, refuted, or undetermined (budget exhausted).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::exact::{pow2_neg, Interval, Rational};
use crate::machine::{CarrierId, Value};
use crate::names::{
    beta_decode, beta_encode, decode_integer, decode_natural, decode_rational_record,
    encode_integer, encode_natural, encode_rational_record, interval_records, IntervalSeq,
    NameError, Stream,
};

#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    /// Nothing probed so far contradicts membership. Compositions report the
    /// intermediate name that witnessed it.
    Consistent {
        witness: Option<Value>,
    },
    Refuted(String),
    Undetermined(String),
}

impl Membership {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Membership::Consistent { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Membership::Refuted(_))
    }

    fn plain() -> Self {
        Membership::Consistent { witness: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Approximation {
    /// The name determines the object exactly.
    Exact(Value),
    /// A rational interval of width at most `2^-d` containing every denoted object.
    Interval(Interval),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum RepError {
    #[error("{rep}: expected a `{expected}` value")]
    Kind { rep: String, expected: CarrierId },
    #[error(transparent)]
    Name(#[from] NameError),
    #[error("not a name: record {record} {reason}")]
    NotAName { record: usize, reason: String },
    #[error("insufficient precision after {probed} records")]
    Insufficient { probed: usize },
    #[error("cannot compose: outer names are `{outer}` but inner objects are `{inner}`")]
    CarrierMismatch { outer: CarrierId, inner: CarrierId },
    #[error("{0}")]
    NotEncodable(String),
}

pub trait Representation: Send + Sync {
    fn id(&self) -> String;
    fn name_carrier(&self) -> CarrierId;
    fn object_carrier(&self) -> CarrierId;
    /// A canonical name of `object`.
    fn encode(&self, object: &Value) -> Result<Value, RepError>;
    fn member_at_precision(
        &self,
        name: &Value,
        object: &Value,
        d: u32,
        budget: usize,
    ) -> Membership;
    fn approx_decode(&self, name: &Value, d: u32, budget: usize)
        -> Result<Approximation, RepError>;
    /// The objects denoted by `name`, when the representation can list them.
    fn witnesses(&self, name: &Value, budget: usize) -> Vec<Value> {
        match self.approx_decode(name, 0, budget) {
            Ok(Approximation::Exact(v)) => vec![v],
            _ => Vec::new(),
        }
    }
}

impl fmt::Debug for dyn Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} ⇉ {}",
            self.id(),
            self.name_carrier(),
            self.object_carrier()
        )
    }
}

pub type Rep = Arc<dyn Representation>;

fn kind_error(rep: &dyn Representation, expected: CarrierId) -> RepError {
    RepError::Kind {
        rep: rep.id(),
        expected,
    }
}

/// Membership for representations whose names determine the object exactly.
fn exact_member(
    rep: &dyn Representation,
    name: &Value,
    object: &Value,
    d: u32,
    budget: usize,
) -> Membership {
    match rep.approx_decode(name, d, budget) {
        Ok(Approximation::Exact(v)) if v.agrees_to(object, d as usize) => Membership::plain(),
        Ok(Approximation::Exact(v)) => {
            Membership::Refuted(format!("name denotes {v}, not {object}"))
        }
        Ok(Approximation::Interval(_)) => unreachable!("exact representations decode exactly"),
        Err(e) => Membership::Refuted(e.to_string()),
    }
}

/// `id_X`: every element names itself. Streams are compared on `d` symbols.
#[derive(Clone, Debug)]
pub struct Identity(pub CarrierId);

impl Representation for Identity {
    fn id(&self) -> String {
        format!("id:{}", self.0)
    }
    fn name_carrier(&self) -> CarrierId {
        self.0.clone()
    }
    fn object_carrier(&self) -> CarrierId {
        self.0.clone()
    }
    fn encode(&self, object: &Value) -> Result<Value, RepError> {
        if object.belongs_to(&self.0) {
            Ok(object.clone())
        } else {
            Err(kind_error(self, self.0.clone()))
        }
    }
    fn member_at_precision(
        &self,
        name: &Value,
        object: &Value,
        d: u32,
        budget: usize,
    ) -> Membership {
        exact_member(self, name, object, d, budget)
    }
    fn approx_decode(
        &self,
        name: &Value,
        _d: u32,
        _budget: usize,
    ) -> Result<Approximation, RepError> {
        if name.belongs_to(&self.0) {
            Ok(Approximation::Exact(name.clone()))
        } else {
            Err(kind_error(self, self.0.clone()))
        }
    }
}

/// `β(ι(w)0^ω) = w`.
#[derive(Clone, Copy, Debug)]
pub struct Beta;

impl Representation for Beta {
    fn id(&self) -> String {
        "beta".into()
    }
    fn name_carrier(&self) -> CarrierId {
        CarrierId::new("stream")
    }
    fn object_carrier(&self) -> CarrierId {
        CarrierId::new("word")
    }
    fn encode(&self, object: &Value) -> Result<Value, RepError> {
        let w = object
            .as_word()
            .ok_or_else(|| kind_error(self, self.object_carrier()))?;
        Ok(Value::Stream(beta_encode(w)?))
    }
    fn member_at_precision(
        &self,
        name: &Value,
        object: &Value,
        d: u32,
        budget: usize,
    ) -> Membership {
        exact_member(self, name, object, d, budget)
    }
    fn approx_decode(
        &self,
        name: &Value,
        _d: u32,
        _budget: usize,
    ) -> Result<Approximation, RepError> {
        let p = name
            .as_stream()
            .ok_or_else(|| kind_error(self, self.name_carrier()))?;
        Ok(Approximation::Exact(Value::Word(beta_decode(p)?)))
    }
}

/// The canonical word names of ℕ, ℤ and ℚ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumberWords {
    Natural,
    Integer,
    Rational,
}

impl Representation for NumberWords {
    fn id(&self) -> String {
        self.object_carrier().to_string()
    }
    fn name_carrier(&self) -> CarrierId {
        CarrierId::new("word")
    }
    fn object_carrier(&self) -> CarrierId {
        CarrierId::new(match self {
            NumberWords::Natural => "nat",
            NumberWords::Integer => "int",
            NumberWords::Rational => "rat",
        })
    }
    fn encode(&self, object: &Value) -> Result<Value, RepError> {
        let w = match (self, object) {
            (NumberWords::Natural, Value::Natural(n)) => encode_natural(n),
            (NumberWords::Integer, Value::Integer(z)) => encode_integer(z),
            (NumberWords::Rational, Value::Rational(q)) => encode_rational_record(q),
            _ => return Err(kind_error(self, self.object_carrier())),
        };
        Ok(Value::Word(w))
    }
    fn member_at_precision(
        &self,
        name: &Value,
        object: &Value,
        d: u32,
        budget: usize,
    ) -> Membership {
        exact_member(self, name, object, d, budget)
    }
    fn approx_decode(
        &self,
        name: &Value,
        _d: u32,
        _budget: usize,
    ) -> Result<Approximation, RepError> {
        let w = name
            .as_word()
            .ok_or_else(|| kind_error(self, self.name_carrier()))?;
        Ok(Approximation::Exact(match self {
            NumberWords::Natural => Value::Natural(decode_natural(w)?),
            NumberWords::Integer => Value::Integer(decode_integer(w)?),
            NumberWords::Rational => Value::Rational(decode_rational_record(w)?),
        }))
    }
}

/// `γ`: binary names of interval sequences.
#[derive(Clone, Copy, Debug)]
pub struct SriCode;

impl Representation for SriCode {
    fn id(&self) -> String {
        "gamma".into()
    }
    fn name_carrier(&self) -> CarrierId {
        CarrierId::new("stream")
    }
    fn object_carrier(&self) -> CarrierId {
        CarrierId::new("sri")
    }
    fn encode(&self, object: &Value) -> Result<Value, RepError> {
        let s = object
            .as_interval_seq()
            .ok_or_else(|| kind_error(self, self.object_carrier()))?;
        Ok(Value::Stream(s.to_stream()))
    }
    /// Compares the first `d + 1` records.
    fn member_at_precision(
        &self,
        name: &Value,
        object: &Value,
        d: u32,
        _budget: usize,
    ) -> Membership {
        let (Some(p), Some(seq)) = (name.as_stream(), object.as_interval_seq()) else {
            return Membership::Refuted("wrong kinds for γ".into());
        };
        let decoded = interval_records(p);
        for n in 0..=d as usize {
            match (decoded.get(n), seq.get(n)) {
                (Ok(a), Ok(b)) if a == b => {}
                (Ok(a), Ok(b)) => {
                    return Membership::Refuted(format!("record {} is {a}, expected {b}", n + 1))
                }
                (Err(e), _) => return Membership::Refuted(e.to_string()),
                (_, Err(e)) => {
                    return Membership::Refuted(format!("object is not a sequence: {e}"))
                }
            }
        }
        Membership::plain()
    }
    fn approx_decode(
        &self,
        name: &Value,
        _d: u32,
        _budget: usize,
    ) -> Result<Approximation, RepError> {
        let p = name
            .as_stream()
            .ok_or_else(|| kind_error(self, self.name_carrier()))?;
        Ok(Approximation::Exact(Value::IntervalSeq(interval_records(
            p,
        ))))
    }
}

/// `δ(I₀, I₁, …) = x` iff `⋂ₙ Iₙ = {x}`.
#[derive(Clone, Copy, Debug)]
pub struct IntervalRep;

impl Representation for IntervalRep {
    fn id(&self) -> String {
        "delta".into()
    }
    fn name_carrier(&self) -> CarrierId {
        CarrierId::new("sri")
    }
    fn object_carrier(&self) -> CarrierId {
        CarrierId::new("real")
    }
    fn encode(&self, object: &Value) -> Result<Value, RepError> {
        let x = object
            .as_rational()
            .ok_or_else(|| kind_error(self, self.object_carrier()))?;
        Ok(Value::IntervalSeq(rho_intervals(x.clone())))
    }
    fn member_at_precision(
        &self,
        name: &Value,
        object: &Value,
        d: u32,
        budget: usize,
    ) -> Membership {
        let (Some(seq), Some(x)) = (name.as_interval_seq(), object.as_rational()) else {
            return Membership::Refuted("wrong kinds for δ".into());
        };
        match scan(seq, d, budget, Some(x)) {
            Ok(_) => Membership::plain(),
            Err(e @ RepError::Insufficient { .. }) => Membership::Undetermined(e.to_string()),
            Err(e) => Membership::Refuted(e.to_string()),
        }
    }
    fn approx_decode(
        &self,
        name: &Value,
        d: u32,
        budget: usize,
    ) -> Result<Approximation, RepError> {
        let seq = name
            .as_interval_seq()
            .ok_or_else(|| kind_error(self, self.name_carrier()))?;
        Ok(Approximation::Interval(decode_sri(seq, d, budget)?))
    }
}

/// `δ ⊙ γ`.
#[derive(Clone)]
pub struct Composed {
    outer: Rep,
    inner: Rep,
    id: String,
}

impl Composed {
    pub fn outer(&self) -> &Rep {
        &self.outer
    }

    pub fn inner(&self) -> &Rep {
        &self.inner
    }
}

pub fn compose_rel(outer: Rep, inner: Rep) -> Result<Composed, RepError> {
    if !outer.name_carrier().compatible(&inner.object_carrier()) {
        return Err(RepError::CarrierMismatch {
            outer: outer.name_carrier(),
            inner: inner.object_carrier(),
        });
    }
    let id = format!("{}.{}", outer.id(), inner.id());
    Ok(Composed { outer, inner, id })
}

impl fmt::Debug for Composed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {:?} ⊙ {:?}", self.id, self.outer, self.inner)
    }
}

impl Composed {
    pub fn named(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}

impl Representation for Composed {
    fn id(&self) -> String {
        self.id.clone()
    }
    fn name_carrier(&self) -> CarrierId {
        self.inner.name_carrier()
    }
    fn object_carrier(&self) -> CarrierId {
        self.outer.object_carrier()
    }
    fn encode(&self, object: &Value) -> Result<Value, RepError> {
        self.inner.encode(&self.outer.encode(object)?)
    }
    fn member_at_precision(
        &self,
        name: &Value,
        object: &Value,
        d: u32,
        budget: usize,
    ) -> Membership {
        let ys = self.inner.witnesses(name, budget);
        if ys.is_empty() {
            return Membership::Undetermined("inner representation lists no witnesses".into());
        }
        let mut last = None;
        for y in ys {
            let inner = self.inner.member_at_precision(name, &y, d, budget);
            if !inner.is_consistent() {
                last = Some(inner);
                continue;
            }
            match self.outer.member_at_precision(&y, object, d, budget) {
                Membership::Consistent { .. } => {
                    return Membership::Consistent { witness: Some(y) }
                }
                m => last = Some(m),
            }
        }
        last.expect("at least one witness was tried")
    }
    fn approx_decode(
        &self,
        name: &Value,
        d: u32,
        budget: usize,
    ) -> Result<Approximation, RepError> {
        match self.inner.approx_decode(name, d, budget)? {
            Approximation::Exact(y) => self.outer.approx_decode(&y, d, budget),
            Approximation::Interval(_) => Err(RepError::NotEncodable(format!(
                "{}: inner representation does not decode exactly",
                self.id
            ))),
        }
    }
    fn witnesses(&self, name: &Value, budget: usize) -> Vec<Value> {
        self.inner
            .witnesses(name, budget)
            .iter()
            .flat_map(|y| self.outer.witnesses(y, budget))
            .collect()
    }
}

/// `ρ = δ ⊙ γ`: binary names of real numbers.
pub fn rho() -> Composed {
    compose_rel(Arc::new(IntervalRep), Arc::new(SriCode))
        .expect("δ and γ compose")
        .named("rho")
}

/// Looks up a representation by id: `beta`, `nat`, `int`, `rat`, `gamma`,
/// `delta`, `rho`, or `id:CARRIER`.
pub fn by_id(id: &str) -> Option<Rep> {
    Some(match id {
        "beta" => Arc::new(Beta),
        "nat" => Arc::new(NumberWords::Natural),
        "int" => Arc::new(NumberWords::Integer),
        "rat" => Arc::new(NumberWords::Rational),
        "gamma" => Arc::new(SriCode),
        "delta" => Arc::new(IntervalRep),
        "rho" => Arc::new(rho()),
        _ => Arc::new(Identity(CarrierId::new(id.strip_prefix("id:")?))),
    })
}

/// `Iₙ = [x − 2^-n; x + 2^-n]`.
pub fn rho_intervals(x: Rational) -> IntervalSeq {
    IntervalSeq::from_fn(move |n| Interval::ball(&x, &pow2_neg(n as u32)))
}

pub fn rho_encode(x: &Rational) -> Stream {
    rho_intervals(x.clone()).to_stream()
}

/// Scans records keeping the running intersection until it is at most
/// `2^-d` wide. With `point`, every record must also contain it.
fn scan(
    seq: &IntervalSeq,
    d: u32,
    probe_limit: usize,
    point: Option<&Rational>,
) -> Result<Interval, RepError> {
    let target = pow2_neg(d);
    let mut running: Option<Interval> = None;
    for n in 0..probe_limit {
        let i = seq.get(n)?;
        if let Some(x) = point {
            if !i.contains(x) {
                return Err(RepError::NotAName {
                    record: n + 1,
                    reason: format!("{i} excludes {x}"),
                });
            }
        }
        let next = match &running {
            None => i,
            Some(r) => r.intersect(&i).ok_or_else(|| RepError::NotAName {
                record: n + 1,
                reason: format!("{i} misses the running intersection {r}"),
            })?,
        };
        if next.width() <= target {
            return Ok(next);
        }
        running = Some(next);
    }
    Err(RepError::Insufficient {
        probed: probe_limit,
    })
}

/// First running intersection of width at most `2^-d`, reading at most
/// `probe_limit` intervals.
pub fn decode_sri(seq: &IntervalSeq, d: u32, probe_limit: usize) -> Result<Interval, RepError> {
    scan(seq, d, probe_limit, None)
}

pub fn rho_decode(p: &Stream, d: u32, probe_limit: usize) -> Result<Interval, RepError> {
    decode_sri(&interval_records(p), d, probe_limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::names::{interval_stream, Word};

    #[test]
    fn rho_encode_intervals() {
        let seq = rho_intervals(int(0));
        assert_eq!(
            seq.get(0).unwrap(),
            Interval {
                lo: int(-1),
                hi: int(1)
            }
        );
        assert_eq!(
            seq.get(1).unwrap(),
            Interval {
                lo: rat(-1, 2),
                hi: rat(1, 2)
            }
        );
        assert_eq!(
            seq.get(2).unwrap(),
            Interval {
                lo: rat(-1, 4),
                hi: rat(1, 4)
            }
        );
        let third = rho_intervals(rat(1, 3));
        assert_eq!(
            third.get(2).unwrap(),
            Interval {
                lo: rat(1, 12),
                hi: rat(7, 12)
            }
        );
        let p = rho_encode(&rat(1, 3));
        assert_eq!(interval_records(&p).get(2).unwrap(), third.get(2).unwrap());
    }

    #[test]
    fn rho_decode_examples() {
        let i = rho_decode(&rho_encode(&rat(1, 3)), 10, 100).unwrap();
        assert!(i.contains(&rat(1, 3)) && i.width() <= pow2_neg(10));

        let disjoint = interval_stream(|n| Interval {
            lo: int(2 * n as i64),
            hi: int(2 * n as i64 + 1),
        });
        assert!(matches!(
            rho_decode(&disjoint, 5, 50),
            Err(RepError::NotAName { record: 2, .. })
        ));

        let flat = interval_stream(|_| Interval {
            lo: int(0),
            hi: int(1),
        });
        assert_eq!(
            rho_decode(&flat, 1, 50),
            Err(RepError::Insufficient { probed: 50 })
        );
    }

    #[test]
    fn composition_with_identity_is_transparent() {
        let delta: Rep = Arc::new(IntervalRep);
        let composed =
            compose_rel(delta.clone(), Arc::new(Identity(CarrierId::new("sri")))).unwrap();
        let name = delta.encode(&Value::Rational(rat(2, 7))).unwrap();
        for d in [0, 5, 20] {
            for x in [rat(2, 7), rat(3, 7)] {
                let obj = Value::Rational(x);
                assert_eq!(
                    composed
                        .member_at_precision(&name, &obj, d, 100)
                        .is_consistent(),
                    delta
                        .member_at_precision(&name, &obj, d, 100)
                        .is_consistent()
                );
            }
        }
    }

    #[test]
    fn composition_checks_carriers() {
        let err = compose_rel(Arc::new(IntervalRep), Arc::new(Beta)).unwrap_err();
        assert!(matches!(err, RepError::CarrierMismatch { .. }));
    }

    #[test]
    fn rho_membership_reports_witness() {
        let r = rho();
        let x = Value::Rational(rat(5, 9));
        let name = r.encode(&x).unwrap();
        let Membership::Consistent { witness: Some(y) } = r.member_at_precision(&name, &x, 30, 100)
        else {
            panic!("expected a witness");
        };
        assert!(r
            .inner()
            .member_at_precision(&name, &y, 30, 100)
            .is_consistent());
        assert!(r
            .outer()
            .member_at_precision(&y, &x, 30, 100)
            .is_consistent());
        assert!(r
            .member_at_precision(&name, &Value::Rational(rat(5, 8)), 30, 100)
            .is_refuted());
    }

    #[test]
    fn beta_representation_matches_names() {
        for len in 0..=8u32 {
            for bits in 0..(1u32 << len) {
                let w = Word::new(
                    (0..len)
                        .map(|i| if bits >> i & 1 == 1 { b'1' } else { b'0' })
                        .collect(),
                );
                let name = Beta.encode(&Value::Word(w.clone())).unwrap();
                assert_eq!(beta_decode(name.as_stream().unwrap()).unwrap(), w);
                assert!(Beta
                    .member_at_precision(&name, &Value::Word(w.clone()), 0, 0)
                    .is_consistent());
                assert_eq!(
                    Beta.approx_decode(&name, 0, 0).unwrap(),
                    Approximation::Exact(Value::Word(w))
                );
            }
        }
    }

    #[test]
    fn refutation_is_monotone_in_precision() {
        let name = Value::IntervalSeq(rho_intervals(rat(1, 3)));
        let wrong = Value::Rational(rat(1, 3) + pow2_neg(12));
        let first = (0..40)
            .find(|d| {
                IntervalRep
                    .member_at_precision(&name, &wrong, *d, 200)
                    .is_refuted()
            })
            .unwrap();
        for d in first..40 {
            assert!(IntervalRep
                .member_at_precision(&name, &wrong, d, 200)
                .is_refuted());
        }
    }
}
