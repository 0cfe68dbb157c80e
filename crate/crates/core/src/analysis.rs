//! Exact-real examples: interval addition, the approximate comparison
//! `≤_k`, the limit operator, and power-series summation `H = Lim ∘ S ∘ f_N`.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::builtins::sri_add_streams;
use crate::exact::{pow2_neg, sqrt_upper, ComplexQ, Interval, Rational};
use crate::names::{IntervalSeq, NameError, Stream};
use crate::represent::{rho_decode, RepError};

/// `f₊`: componentwise sum of two interval sequences given by binary names.
pub fn interval_add(a: &Stream, b: &Stream) -> Stream {
    sri_add_streams(a, b)
}

pub fn interval_add_seq(a: &IntervalSeq, b: &IntervalSeq) -> IntervalSeq {
    a.add(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    Tt,
    Ff,
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::Tt => "tt",
            Truth::Ff => "ff",
        })
    }
}

/// `x ≤_k y`: `tt` if `x < y`, `ff` if `x > y + 2^-k`, either in between.
///
/// Both names are decoded to width `2^-(k+3)`; the answer is `tt` iff
/// `x̄ < ȳ + 2^-(k+1)` for the upper endpoints `x̄`, `ȳ`. If `x < y` then
/// `x̄ ≤ x + 2^-(k+3) < ȳ + 2^-(k+1)`; if `x > y + 2^-k` then
/// `x̄ > ȳ − 2^-(k+3) + 2^-k > ȳ + 2^-(k+1)`.
pub fn approx_leq_k(x: &Stream, y: &Stream, k: u32, budget: usize) -> Result<Truth, RepError> {
    let xi = rho_decode(x, k + 3, budget)?;
    let yi = rho_decode(y, k + 3, budget)?;
    Ok(if xi.hi < yi.hi + pow2_neg(k + 1) {
        Truth::Tt
    } else {
        Truth::Ff
    })
}

/// A pair of interval sequences naming the real and imaginary parts.
#[derive(Clone, Debug)]
pub struct ComplexName {
    pub re: IntervalSeq,
    pub im: IntervalSeq,
}

impl ComplexName {
    pub fn to_streams(&self) -> (Stream, Stream) {
        (self.re.to_stream(), self.im.to_stream())
    }
}

/// `Lim`: from `b` with `|b_k − s| ≤ 2^-k`, interval `n` is
/// `Re b_{n+2} ± 2^-(n+1)` (and likewise for the imaginary part), which
/// contains `s` and has width `2^-n`.
pub fn limit(b: impl Fn(usize) -> Result<ComplexQ, String> + Send + Sync + 'static) -> ComplexName {
    let b = Arc::new(b);
    let part = |re: bool| {
        let b = b.clone();
        IntervalSeq::from_results(move |n| {
            let bk = b(n + 2).map_err(NameError::NotAName)?;
            let center = if re { bk.re } else { bk.im };
            Ok(Interval::ball(&center, &pow2_neg(n as u32 + 1)))
        })
    };
    ComplexName {
        re: part(true),
        im: part(false),
    }
}

type Coefficients = dyn Fn(usize) -> Rational + Send + Sync;

/// `Σ a_j z^j` with radius `r` and Cauchy constant `M`.
#[derive(Clone)]
pub struct PowerSeriesInput {
    pub coefficients: Arc<Coefficients>,
    pub r: Rational,
    pub m: Rational,
    pub z: ComplexQ,
}

impl PowerSeriesInput {
    pub fn new(
        coefficients: impl Fn(usize) -> Rational + Send + Sync + 'static,
        r: Rational,
        m: Rational,
        z: ComplexQ,
    ) -> Self {
        Self {
            coefficients: Arc::new(coefficients),
            r,
            m,
            z,
        }
    }

    /// `a_j = 1` for all `j`.
    pub fn geometric(r: Rational, m: Rational, z: ComplexQ) -> Self {
        Self::new(|_| Rational::one(), r, m, z)
    }
}

impl fmt::Debug for PowerSeriesInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PowerSeriesInput(r={}, M={}, z={})",
            self.r, self.m, self.z
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("r and M must be positive")]
    NonPositive,
    #[error("|z| ≥ r: |z|² = {norm_sqr} but r² = {r_sqr}")]
    OutsideDisc { norm_sqr: Rational, r_sqr: Rational },
    #[error("Cauchy bound fails at j = {j}: |a_j| = {a} > M·r^-j = {bound}")]
    CauchyBound {
        j: usize,
        a: Rational,
        bound: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSum {
    /// `s_n`.
    pub value: ComplexQ,
    pub n: usize,
    /// The ratio bound `q` with `|z|/r < q < 1`.
    pub q: Rational,
}

/// `c̄ ≥ |z|/r` with `c̄ < 1`, from `√(|z|²/r²)` rounded up at `2^-p`,
/// refining `p` until the bound drops below 1.
fn ratio_bound(input: &PowerSeriesInput, k: u32) -> Result<Rational, SeriesError> {
    if !input.r.is_positive() || !input.m.is_positive() {
        return Err(SeriesError::NonPositive);
    }
    let norm_sqr = input.z.norm_sqr();
    let r_sqr = &input.r * &input.r;
    if norm_sqr >= r_sqr {
        return Err(SeriesError::OutsideDisc { norm_sqr, r_sqr });
    }
    let ratio_sqr = norm_sqr / r_sqr;
    let mut p = k + 4;
    loop {
        let c = sqrt_upper(&ratio_sqr, p);
        if c < Rational::one() {
            return Ok(c);
        }
        p += 8;
    }
}

fn tail_bound(m: &Rational, q: &Rational, n: usize) -> Rational {
    m * num_traits::pow(q.clone(), n) / (Rational::one() - q)
}

/// Least `n` with `M qⁿ / (1 − q) < 2^-k`: doubling, then binary search.
fn terms_needed(m: &Rational, q: &Rational, k: u32) -> usize {
    let target = pow2_neg(k);
    let ok = |n: usize| tail_bound(m, q, n) < target;
    if ok(0) {
        return 0;
    }
    let mut hi = 1;
    while !ok(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    // invariant: !ok(lo), ok(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `b_k = s_n` with `|b_k − s| ≤ 2^-k`.
pub fn series_partial(input: &PowerSeriesInput, k: u32) -> Result<PartialSum, SeriesError> {
    let c = ratio_bound(input, k)?;
    let q = (c + Rational::one()) / Rational::from_integer(2.into());
    let n = terms_needed(&input.m, &q, k);
    let r_inv = Rational::one() / &input.r;
    let mut bound = input.m.clone();
    let coefficients: Vec<Rational> = (0..n)
        .map(|j| {
            let a = (input.coefficients)(j);
            if a.abs() > bound {
                return Err(SeriesError::CauchyBound {
                    j,
                    a,
                    bound: bound.clone(),
                });
            }
            bound = &bound * &r_inv;
            Ok(a)
        })
        .collect::<Result<_, _>>()?;
    let mut value = ComplexQ::zero();
    for a in coefficients.iter().rev() {
        value = value.mul(&input.z).add(&ComplexQ::real(a.clone()));
    }
    Ok(PartialSum { value, n, q })
}

/// `H`: the `S` stream `k ↦ series_partial(k)` passed through [`limit`].
/// The disc condition and the first partial sum are checked eagerly; later
/// failures surface as errors in the interval sequences.
pub fn series_sum(input: &PowerSeriesInput) -> Result<ComplexName, SeriesError> {
    series_partial(input, 2)?;
    let input = input.clone();
    Ok(limit(move |k| {
        series_partial(&input, k as u32)
            .map(|p| p.value)
            .map_err(|e| e.to_string())
    }))
}

/// Closed form `Σ z^j = 1 / (1 − z)` for real `z` with `|z| < 1`.
pub fn geometric_sum(z: &Rational) -> Rational {
    assert!(z.abs() < Rational::one());
    Rational::one() / (Rational::one() - z)
}
