//! Exact scalars used by every frequency-domain computation.
//!
//! Frequencies are rational multiples of π ([`RationalPi`]), magnitudes are
//! square roots of rationals ([`SqrtRational`]) and phases are rational
//! multiples of π reduced modulo 2π ([`PhasePi`]). Together these are closed
//! under the dyadic dilations, 2π-translations and products that appear in
//! the wavelet equations, so no step of the verification ever rounds.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary precision rational number.
pub type Rational = BigRational;

/// Shorthand for building a rational from two machine integers.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `2^j` as a rational, for any sign of `j`.
pub fn pow2(j: i32) -> Rational {
    let p = BigInt::one() << j.unsigned_abs();
    if j >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Formats a rational as `p/q`, always with an explicit denominator.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational '{s}'"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in '{s}'")));
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact square root of a nonnegative rational, when it is a perfect square.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// serde adapter for [`Rational`] fields stored as `"p/q"` strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// The real number `coeff · π`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPi(Rational);

impl RationalPi {
    pub fn new(coeff: Rational) -> Self {
        RationalPi(coeff)
    }

    /// `numer/denom · π`.
    pub fn frac(numer: i64, denom: i64) -> Self {
        RationalPi(rat(numer, denom))
    }

    pub fn int(k: i64) -> Self {
        RationalPi(rat_int(k))
    }

    pub fn zero() -> Self {
        RationalPi(Rational::zero())
    }

    pub fn pi() -> Self {
        Self::int(1)
    }

    pub fn two_pi() -> Self {
        Self::int(2)
    }

    /// Coefficient of π.
    pub fn coeff(&self) -> &Rational {
        &self.0
    }

    pub fn into_coeff(self) -> Rational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        RationalPi(self.0.abs())
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        RationalPi(&self.0 * factor)
    }

    /// `2^j · self`.
    pub fn scale_pow2(&self, j: i32) -> Self {
        RationalPi(&self.0 * pow2(j))
    }

    /// `self + 2kπ`.
    pub fn shift_2pi(&self, k: i64) -> Self {
        RationalPi(&self.0 + rat_int(2 * k))
    }

    /// `self / other` as a plain rational.
    pub fn ratio(&self, other: &RationalPi) -> Rational {
        &self.0 / &other.0
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.0) * std::f64::consts::PI
    }

    /// Value as a multiple of π, in floating point.
    pub fn coeff_f64(&self) -> f64 {
        to_f64(&self.0)
    }

    /// Largest integer `k` with `2kπ <= self`.
    pub fn floor_2pi(&self) -> BigInt {
        let half = &self.0 / rat_int(2);
        half.floor().to_integer()
    }

    pub fn midpoint(&self, other: &RationalPi) -> Self {
        RationalPi((&self.0 + &other.0) / rat_int(2))
    }

    pub fn min_ref<'a>(&'a self, other: &'a RationalPi) -> &'a RationalPi {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max_ref<'a>(&'a self, other: &'a RationalPi) -> &'a RationalPi {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for RationalPi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}π", format_rational(&self.0))
    }
}

impl Add for RationalPi {
    type Output = RationalPi;
    fn add(self, rhs: RationalPi) -> RationalPi {
        RationalPi(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a RationalPi> for &'a RationalPi {
    type Output = RationalPi;
    fn add(self, rhs: &RationalPi) -> RationalPi {
        RationalPi(&self.0 + &rhs.0)
    }
}

impl Sub for RationalPi {
    type Output = RationalPi;
    fn sub(self, rhs: RationalPi) -> RationalPi {
        RationalPi(self.0 - rhs.0)
    }
}

impl<'a> Sub<&'a RationalPi> for &'a RationalPi {
    type Output = RationalPi;
    fn sub(self, rhs: &RationalPi) -> RationalPi {
        RationalPi(&self.0 - &rhs.0)
    }
}

impl Neg for RationalPi {
    type Output = RationalPi;
    fn neg(self) -> RationalPi {
        RationalPi(-self.0)
    }
}

impl Neg for &RationalPi {
    type Output = RationalPi;
    fn neg(self) -> RationalPi {
        RationalPi(-&self.0)
    }
}

impl Serialize for RationalPi {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_rational::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for RationalPi {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        serde_rational::deserialize(d).map(RationalPi)
    }
}

/// Binary operations on [`RationalPi`] as a single entry point.
#[derive(Clone, Debug)]
pub enum PiOp {
    Add(RationalPi),
    Sub(RationalPi),
    Scale(Rational),
    ScalePow2(i32),
}

pub fn rationalpi_arith(a: &RationalPi, op: &PiOp) -> RationalPi {
    match op {
        PiOp::Add(b) => a + b,
        PiOp::Sub(b) => a - b,
        PiOp::Scale(q) => a.scale(q),
        PiOp::ScalePow2(j) => a.scale_pow2(*j),
    }
}

/// `√radicand` for a nonnegative rational radicand.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SqrtRational {
    #[serde(with = "serde_rational")]
    radicand: Rational,
}

impl SqrtRational {
    pub fn new(radicand: Rational) -> Result<Self> {
        if radicand.is_negative() {
            return Err(Error::InvalidValue(format!(
                "negative radicand {}",
                format_rational(&radicand)
            )));
        }
        Ok(SqrtRational { radicand })
    }

    /// The magnitude whose square is `square`.
    pub fn from_square(square: Rational) -> Result<Self> {
        Self::new(square)
    }

    pub fn one() -> Self {
        SqrtRational {
            radicand: Rational::one(),
        }
    }

    pub fn radicand(&self) -> &Rational {
        &self.radicand
    }

    pub fn square(&self) -> Rational {
        self.radicand.clone()
    }

    pub fn mul(&self, other: &SqrtRational) -> SqrtRational {
        SqrtRational {
            radicand: &self.radicand * &other.radicand,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.radicand.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.radicand).sqrt()
    }
}

/// Phase angle `turns · π`, normalised so that `turns ∈ [0, 2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhasePi(Rational);

impl PhasePi {
    pub fn new(turns: Rational) -> Self {
        let two = rat_int(2);
        let r = &turns - &two * (&turns / &two).floor();
        PhasePi(r)
    }

    pub fn frac(numer: i64, denom: i64) -> Self {
        Self::new(rat(numer, denom))
    }

    pub fn zero() -> Self {
        PhasePi(Rational::zero())
    }

    /// The phase π.
    pub fn half_turn() -> Self {
        PhasePi(Rational::one())
    }

    pub fn turns(&self) -> &Rational {
        &self.0
    }

    pub fn add(&self, other: &PhasePi) -> PhasePi {
        PhasePi::new(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &PhasePi) -> PhasePi {
        PhasePi::new(&self.0 - &other.0)
    }

    pub fn neg(&self) -> PhasePi {
        PhasePi::new(-&self.0)
    }

    /// The phase rotated by π.
    pub fn antipode(&self) -> PhasePi {
        PhasePi::new(&self.0 + Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn radians(&self) -> f64 {
        to_f64(&self.0) * std::f64::consts::PI
    }
}

impl fmt::Display for PhasePi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}π", format_rational(&self.0))
    }
}

#[derive(Serialize, Deserialize)]
struct PhaseRepr {
    #[serde(with = "serde_rational")]
    turns: Rational,
}

impl Serialize for PhasePi {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PhaseRepr {
            turns: self.0.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PhasePi {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        PhaseRepr::deserialize(d).map(|r| PhasePi::new(r.turns))
    }
}

/// Outcome of testing `p1 + p2 − p3 − p4 ≡ π (mod 2π)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddPiTest {
    pub holds: bool,
    /// `m` with `p1 + p2 − p3 − p4 = (2m + 1)π`, using the normalised
    /// representatives of the four phases.
    pub m: Option<i64>,
}

pub fn phase_sum_is_odd_pi(p1: &PhasePi, p2: &PhasePi, p3: &PhasePi, p4: &PhasePi) -> OddPiTest {
    let sum = &p1.0 + &p2.0 - &p3.0 - &p4.0;
    if !sum.is_integer() {
        return OddPiTest {
            holds: false,
            m: None,
        };
    }
    let s = sum.to_integer();
    if s.is_odd() {
        let m = (s - BigInt::one()) / BigInt::from(2);
        OddPiTest {
            holds: true,
            m: m.to_i64(),
        }
    } else {
        OddPiTest {
            holds: false,
            m: None,
        }
    }
}

/// Smallest `j` such that `2^j · x >= bound`, for positive `x` and `bound`.
pub fn ceil_log2_ratio(bound: &Rational, x: &Rational) -> i32 {
    debug_assert!(x.is_positive() && bound.is_positive());
    let mut j = 0i32;
    let mut v = x.clone();
    while &v < bound {
        v *= rat_int(2);
        j += 1;
    }
    let half = rat(1, 2);
    loop {
        let smaller = &v * &half;
        if &smaller >= bound {
            v = smaller;
            j -= 1;
        } else {
            break;
        }
    }
    j
}

impl Ord for SqrtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.radicand.cmp(&other.radicand)
    }
}

impl PartialOrd for SqrtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
