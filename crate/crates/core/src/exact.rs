//! Exact rational helpers: dyadic powers, intervals, complex rationals.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// `2^-n` as an exact rational.
pub fn pow2_neg(n: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << n as usize)
}

pub fn pow2(n: u32) -> Rational {
    Rational::from_integer(BigInt::one() << n as usize)
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q`, `p`, or a decimal like `-1.25`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let mag: BigInt = digits.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(mag, den);
        return Some(if negative { -value } else { value });
    }
    text.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// Smallest dyadic `s / 2^p` with `s / 2^p >= sqrt(square)`, for `square >= 0`.
pub fn sqrt_upper(square: &Rational, p: u32) -> Rational {
    assert!(!square.is_negative(), "sqrt_upper of a negative rational");
    let scaled = square * pow2(2 * p);
    let floor = scaled.floor().to_integer();
    let floor = floor.to_biguint().unwrap_or_else(BigUint::zero);
    let mut root = floor.sqrt();
    let root_sq = Rational::from_integer(BigInt::from(&root * &root));
    if root_sq < scaled {
        root += 1u32;
    }
    Rational::new(BigInt::from(root), BigInt::one() << p as usize)
}

/// A closed interval with rational endpoints, `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Option<Self> {
        (lo <= hi).then_some(Self { lo, hi })
    }

    /// `[center - radius; center + radius]`.
    pub fn ball(center: &Rational, radius: &Rational) -> Self {
        Self {
            lo: center - radius,
            hi: center + radius,
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = if self.lo >= other.lo {
            &self.lo
        } else {
            &other.lo
        };
        let hi = if self.hi <= other.hi {
            &self.hi
        } else {
            &other.hi
        };
        Interval::new(lo.clone(), hi.clone())
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn is_proper(&self) -> bool {
        self.lo < self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{};{}]", self.lo, self.hi)
    }
}

/// A complex number with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexQ {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexQ {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self {
            re,
            im: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::real(Rational::zero())
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn add(&self, other: &ComplexQ) -> ComplexQ {
        ComplexQ::new(&self.re + &other.re, &self.im + &other.im)
    }

    pub fn sub(&self, other: &ComplexQ) -> ComplexQ {
        ComplexQ::new(&self.re - &other.re, &self.im - &other.im)
    }

    pub fn mul(&self, other: &ComplexQ) -> ComplexQ {
        ComplexQ::new(
            &self.re * &other.re - &self.im * &other.im,
            &self.re * &other.im + &self.im * &other.re,
        )
    }
}

impl fmt::Display for ComplexQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.re, self.im)
    }
}
