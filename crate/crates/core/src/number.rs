// SPDX-License-Identifier: Apache-2.0

//! Exact arithmetic for rotation numbers.
//!
//! A [`QuadraticElement`] is an element `a + b·√d` of a real quadratic field
//! with rational `a`, `b` and square-free `d`. Floors, fractional parts and
//! integrality are decided exactly, which is what every group-membership
//! question about a rotation angle reduces to.
//!
//! [`RotationNumber`] wraps such an element reduced into `(0, 1)`, together
//! with the user-facing representation it was built from. Points on the
//! circle are [`Angle`]s: 64-bit fixed-point turns, so that rotations are
//! exact wrapping additions.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element `rational + surd·√radicand` of `ℚ(√radicand)`.
///
/// `radicand` is square-free and at least 2, or equal to 1 when the element is
/// rational (then `surd` is zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticElement {
    rational: BigRational,
    surd: BigRational,
    radicand: BigInt,
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn ratio(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// Splits `d > 0` as `s²·f` with `f` square-free.
fn square_free_split(d: u64) -> (u64, u64) {
    let mut rest = d;
    let mut square = 1u64;
    let mut p = 2u64;
    while p * p <= rest {
        while rest.is_multiple_of(p * p) {
            rest /= p * p;
            square *= p;
        }
        p += 1;
    }
    (square, rest)
}

impl QuadraticElement {
    pub fn zero() -> Self {
        Self::rational(BigRational::zero())
    }

    pub fn rational(value: BigRational) -> Self {
        Self {
            rational: value,
            surd: BigRational::zero(),
            radicand: BigInt::one(),
        }
    }

    pub fn integer(value: i64) -> Self {
        Self::rational(ratio(big(value)))
    }

    /// `(p + q·√d) / r`.
    pub fn from_parts(p: i64, q: i64, d: i64, r: i64) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidRotation(
                "denominator r must be nonzero".into(),
            ));
        }
        if d < 0 {
            return Err(Error::InvalidRotation(format!("radicand {d} is negative")));
        }
        let denom = big(r);
        let rational = BigRational::new(big(p), denom.clone());
        if q == 0 || d == 0 {
            return Ok(Self::rational(rational));
        }
        let (square, free) = square_free_split(d as u64);
        let surd = BigRational::new(big(q) * BigInt::from(square), denom);
        Ok(Self::build(rational, surd, BigInt::from(free)))
    }

    fn build(rational: BigRational, surd: BigRational, radicand: BigInt) -> Self {
        if surd.is_zero() || radicand.is_one() {
            let rational = if radicand.is_one() {
                rational + surd
            } else {
                rational
            };
            Self::rational(rational)
        } else {
            Self {
                rational,
                surd,
                radicand,
            }
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.surd
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.surd.is_zero() && self.rational.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.surd.is_zero() && self.rational.is_integer()
    }

    fn common_radicand(&self, other: &Self) -> Option<BigInt> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Some(BigInt::one()),
            (true, false) => Some(other.radicand.clone()),
            (false, true) => Some(self.radicand.clone()),
            (false, false) if self.radicand == other.radicand => Some(self.radicand.clone()),
            _ => None,
        }
    }

    /// Sum, or `None` when the two elements live in different quadratic fields.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        let radicand = self.common_radicand(other)?;
        Some(Self::build(
            &self.rational + &other.rational,
            &self.surd + &other.surd,
            radicand,
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.checked_add(&other.clone().neg())
    }

    pub fn mul_rational(&self, factor: &BigRational) -> Self {
        Self::build(
            &self.rational * factor,
            &self.surd * factor,
            self.radicand.clone(),
        )
    }

    pub fn mul_int(&self, factor: i64) -> Self {
        self.mul_rational(&ratio(big(factor)))
    }

    /// Exact `⌊x⌋`.
    pub fn floor(&self) -> BigInt {
        if self.surd.is_zero() {
            return self.rational.floor().to_integer();
        }
        let den = self.rational.denom().lcm(self.surd.denom());
        let scale = ratio(den.clone());
        let a = (&self.rational * &scale).to_integer();
        let b = (&self.surd * &scale).to_integer();
        // b·√d is irrational, so its floor is isqrt(b²d) or -isqrt(b²d) - 1.
        let root = (&b * &b * &self.radicand).sqrt();
        let whole = if b.is_positive() {
            a + root
        } else {
            a - root - BigInt::one()
        };
        whole.div_floor(&den)
    }

    /// `x - ⌊x⌋`, in `[0, 1)`.
    pub fn fract(&self) -> Self {
        Self::build(
            &self.rational - ratio(self.floor()),
            self.surd.clone(),
            self.radicand.clone(),
        )
    }

    /// `⌊x · 2^bits⌋`.
    pub fn scaled_floor(&self, bits: u32) -> BigInt {
        self.mul_rational(&ratio(BigInt::one() << bits)).floor()
    }

    pub fn to_f64(&self) -> f64 {
        let scaled = self.scaled_floor(64).to_f64().unwrap_or(f64::NAN);
        scaled * 2f64.powi(-64)
    }

    /// Distance from `x` to the nearest integer, as a float.
    pub fn distance_to_integer(&self) -> f64 {
        let f = self.fract().to_f64();
        f.min(1.0 - f)
    }
}

impl Neg for QuadraticElement {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            rational: -self.rational,
            surd: -self.surd,
            radicand: self.radicand,
        }
    }
}

impl fmt::Display for QuadraticElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.rational)
        } else {
            write!(f, "{} + {}·√{}", self.rational, self.surd, self.radicand)
        }
    }
}

/// The user-facing form of a rotation number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaRepr {
    /// `[p, q, d, r]` meaning `(p + q·√d) / r`.
    Quadratic([i64; 4]),
    /// A decimal literal, stored exactly but not known to be irrational.
    Decimal(String),
}

/// An irrational rotation angle, reduced into `(0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GammaRepr", into = "GammaRepr")]
pub struct RotationNumber {
    repr: GammaRepr,
    value: QuadraticElement,
    step: Angle,
}

impl RotationNumber {
    /// `(p + q·√d) / r`, reduced mod 1. Requires `d > 1` not a perfect square
    /// and `q, r ≠ 0`.
    pub fn quadratic(p: i64, q: i64, d: i64, r: i64) -> Result<Self> {
        if d <= 1 {
            return Err(Error::InvalidRotation(format!(
                "radicand {d} must exceed 1"
            )));
        }
        let root = (d as u64).sqrt();
        if root * root == d as u64 {
            return Err(Error::InvalidRotation(format!(
                "radicand {d} is a perfect square"
            )));
        }
        if q == 0 {
            return Err(Error::InvalidRotation("q must be nonzero".into()));
        }
        let value = QuadraticElement::from_parts(p, q, d, r)?.fract();
        Ok(Self::assemble(GammaRepr::Quadratic([p, q, d, r]), value))
    }

    /// The default angle `√2 − 1`.
    pub fn sqrt2_minus_one() -> Self {
        Self::quadratic(-1, 1, 2, 1).expect("valid constant")
    }

    /// A decimal literal such as `"0.4142135623730950488"`, reduced mod 1.
    pub fn decimal(text: &str) -> Result<Self> {
        let value = parse_decimal(text)?;
        let reduced = QuadraticElement::rational(value).fract();
        if reduced.is_zero() {
            return Err(Error::InvalidRotation(format!(
                "{text} is an integer; the rotation would be the identity"
            )));
        }
        Ok(Self::assemble(
            GammaRepr::Decimal(text.trim().to_string()),
            reduced,
        ))
    }

    fn assemble(repr: GammaRepr, value: QuadraticElement) -> Self {
        let bits = value.scaled_floor(64);
        let step = Angle(bits.to_u64().expect("value lies in [0, 1)"));
        Self { repr, value, step }
    }

    pub fn repr(&self) -> &GammaRepr {
        &self.repr
    }

    /// Whether membership questions about this angle can be decided exactly.
    pub fn is_exact(&self) -> bool {
        matches!(self.repr, GammaRepr::Quadratic(_))
    }

    /// The reduced value as an exact field element in `(0, 1)`.
    pub fn element(&self) -> &QuadraticElement {
        &self.value
    }

    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// `⌊γ · 2^bits⌋`; bit-identical for repeated calls.
    pub fn value_bits(&self, bits: u32) -> BigInt {
        self.value.scaled_floor(bits)
    }

    /// Decimal expansion truncated to the number of digits `bits` binary
    /// digits carry.
    pub fn value_string(&self, bits: u32) -> String {
        let digits = ((bits as f64) * std::f64::consts::LOG10_2).ceil() as usize;
        let scale = ratio(BigInt::from(10).pow(digits as u32));
        let scaled = self.value.mul_rational(&scale).floor().to_string();
        format!("0.{scaled:0>digits$}")
    }

    /// The angle as a fixed-point rotation step.
    pub fn angle(&self) -> Angle {
        self.step
    }

    /// `kγ mod 1`, exactly.
    pub fn multiple_mod_one(&self, k: i64) -> QuadraticElement {
        self.value.mul_int(k).fract()
    }

    /// The rotation number `kγ` (reduced), keeping an exact representation.
    pub fn scaled(&self, k: i64) -> Result<Self> {
        match self.repr {
            GammaRepr::Quadratic([p, q, d, r]) => Self::quadratic(k * p, k * q, d, r),
            GammaRepr::Decimal(_) => {
                Err(Error::NonExact("scaling a decimal rotation number".into()))
            }
        }
    }
}

impl TryFrom<GammaRepr> for RotationNumber {
    type Error = Error;

    fn try_from(repr: GammaRepr) -> Result<Self> {
        match repr {
            GammaRepr::Quadratic([p, q, d, r]) => Self::quadratic(p, q, d, r),
            GammaRepr::Decimal(text) => Self::decimal(&text),
        }
    }
}

impl From<RotationNumber> for GammaRepr {
    fn from(value: RotationNumber) -> Self {
        value.repr
    }
}

impl fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            GammaRepr::Quadratic([p, q, d, r]) => write!(f, "({p} + {q}√{d})/{r}"),
            GammaRepr::Decimal(text) => write!(f, "{text}"),
        }
    }
}

fn parse_decimal(text: &str) -> Result<BigRational> {
    let trimmed = text.trim();
    let bad = || Error::InvalidRotation(format!("cannot parse decimal {text:?}"));
    let (negative, body) = match trimmed.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, trimmed.strip_prefix('+').unwrap_or(trimmed)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let denom = BigInt::from(10).pow(frac.len() as u32);
    let value = BigRational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// A point of the circle `ℝ/ℤ` in 64-bit fixed point (`turns · 2^64`).
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Angle(pub u64);

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

impl Angle {
    pub const ZERO: Angle = Angle(0);

    /// Nearest fixed-point angle to `x mod 1`.
    pub fn from_f64(x: f64) -> Self {
        let r = x.rem_euclid(1.0);
        let scaled = (r * TWO_POW_64).round();
        if scaled >= TWO_POW_64 {
            Angle(0)
        } else {
            Angle(scaled as u64)
        }
    }

    /// Value in `[0, 1)`.
    pub fn to_f64(self) -> f64 {
        let v = self.0 as f64 / TWO_POW_64;
        if v >= 1.0 {
            // rounding of values within 2^-54 of a full turn
            0.0
        } else {
            v
        }
    }

    pub fn times(self, k: i64) -> Self {
        Angle(self.0.wrapping_mul(k as u64))
    }

    /// Shortest distance around the circle, in turns.
    pub fn circular_distance(self, other: Angle) -> f64 {
        let d = self.0.wrapping_sub(other.0);
        d.min(d.wrapping_neg()) as f64 / TWO_POW_64
    }

    /// Whether the angle lies in `[a, b)` with `0 ≤ a < b ≤ 1`.
    pub fn in_interval(self, a: f64, b: f64) -> bool {
        let x = self.to_f64();
        a <= x && x < b
    }
}

/// A half-open arc `[a, b)` of the circle with `0 ≤ a < b ≤ 1`, in fixed
/// point: start angle and length in units of `2^-64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AngleArc {
    start: Angle,
    len: u128,
}

impl AngleArc {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a >= b {
            return Err(Error::InvalidArgument(format!(
                "interval [{a}, {b}) is not a nonempty subinterval of [0, 1]"
            )));
        }
        let start = (a * TWO_POW_64).round() as u128;
        let end = (b * TWO_POW_64).round() as u128;
        Ok(Self {
            start: Angle(start as u64),
            len: end - start,
        })
    }

    pub fn start(&self) -> Angle {
        self.start
    }

    /// Length in units of `2^-64`.
    pub fn len_units(&self) -> u128 {
        self.len
    }

    /// Distance from the start, in units of `2^-64`, if `x` lies in the arc.
    pub fn offset(&self, x: Angle) -> Option<u128> {
        let off = (x - self.start).0 as u128;
        (off < self.len).then_some(off)
    }

    pub fn contains(&self, x: Angle) -> bool {
        self.offset(x).is_some()
    }

    pub fn measure(&self) -> f64 {
        self.len as f64 / TWO_POW_64
    }

    pub fn disjoint(&self, other: &AngleArc) -> bool {
        !self.contains(other.start) && !other.contains(self.start)
    }
}

impl Add for Angle {
    type Output = Angle;

    fn add(self, rhs: Angle) -> Angle {
        Angle(self.0.wrapping_add(rhs.0))
    }
}

impl Sub for Angle {
    type Output = Angle;

    fn sub(self, rhs: Angle) -> Angle {
        Angle(self.0.wrapping_sub(rhs.0))
    }
}

impl Neg for Angle {
    type Output = Angle;

    fn neg(self) -> Angle {
        Angle(self.0.wrapping_neg())
    }
}
