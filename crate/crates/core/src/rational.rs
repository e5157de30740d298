//! Exact signed rationals.
//!
//! Values whose numerator and denominator fit in an `i64` are kept inline
//! and combined with `i128` intermediates; anything larger falls back to
//! [`BigRational`]. The representation is canonical, so derived equality and
//! hashing agree with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational number, always normalized (`gcd(|p|, q) = 1`, `q >= 1`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    // den > 0, gcd(|num|, den) = 1, num != i64::MIN
    Small(i64, i64),
    // only values that do not fit `Small`
    Big(BigRational),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational {0:?}")]
pub struct ParseRationalError(pub String);

fn small_fits(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

impl Rational {
    fn from_i128(mut n: i128, mut d: i128) -> Rational {
        debug_assert!(d != 0);
        if d < 0 {
            n = -n;
            d = -d;
        }
        if n == 0 {
            return Rational(Repr::Small(0, 1));
        }
        let g = n.unsigned_abs().gcd(&(d as u128)) as i128;
        if g > 1 {
            n /= g;
            d /= g;
        }
        if small_fits(n) && small_fits(d) {
            Rational(Repr::Small(n as i64, d as i64))
        } else {
            Rational(Repr::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d))))
        }
    }

    fn from_big(r: BigRational) -> Rational {
        // `r` must already be reduced with a positive denominator
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(r)),
        }
    }

    /// `num / den`. Panics when `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
        let den = den.into();
        assert!(!den.is_zero(), "zero denominator");
        Rational::from_big(BigRational::new(num.into(), den))
    }

    /// `num / den` for machine integers. Panics when `den` is zero.
    pub fn ratio(num: i64, den: i64) -> Rational {
        assert!(den != 0, "zero denominator");
        Rational::from_i128(num as i128, den as i128)
    }

    pub fn integer(v: impl Into<BigInt>) -> Rational {
        Rational::from_big(BigRational::from_integer(v.into()))
    }

    /// `2^k` for any integer `k`.
    pub fn pow2(k: i64) -> Rational {
        if (0..62).contains(&k) {
            Rational(Repr::Small(1 << k, 1))
        } else if (-61..0).contains(&k) {
            Rational(Repr::Small(1, 1 << (-k)))
        } else if k >= 0 {
            Rational::integer(BigInt::one() << (k as usize))
        } else {
            Rational::new(1, BigInt::one() << ((-k) as usize))
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    /// Numerator and denominator as machine integers, when they fit.
    pub fn as_small(&self) -> Option<(i64, i64)> {
        match self.0 {
            Repr::Small(n, d) => Some((n, d)),
            Repr::Big(_) => None,
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n > 0,
            Repr::Big(r) => r.is_positive(),
        }
    }

    pub fn abs(&self) -> Rational {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Rational {
        Rational::one() / self
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => BigInt::from(n.div_euclid(*d)),
            Repr::Big(r) => r.floor().to_integer(),
        }
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, d) => BigInt::from(-((-n).div_euclid(*d))),
            Repr::Big(r) => r.ceil().to_integer(),
        }
    }

    /// `ceil(self)` as a `u64`. Panics if negative or too large.
    pub fn ceil_u64(&self) -> u64 {
        self.ceil().to_u64().expect("ceiling does not fit in u64")
    }

    /// `2^-λ * floor(2^λ * self)`: the largest multiple of `2^-λ` not above `self`.
    pub fn floor_lambda(&self, lambda: u32) -> Rational {
        if let Repr::Small(n, d) = self.0 {
            if lambda <= 62 {
                let q = ((n as i128) << lambda).div_euclid(d as i128);
                return Rational::from_i128(q, 1i128 << lambda);
            }
        }
        let scale = BigInt::one() << (lambda as usize);
        let q = (self.to_big() * BigRational::from_integer(scale.clone())).floor();
        Rational::new(q.to_integer(), scale)
    }

    /// `self <= 2^k`.
    pub fn le_pow2(&self, k: i64) -> bool {
        if !self.is_positive() {
            return true;
        }
        let (n, d) = (self.numer(), self.denom());
        if k >= 0 {
            n <= d << (k as usize)
        } else {
            n << ((-k) as usize) <= d
        }
    }

    /// Smallest integer `k` with `2^k >= self`. Panics unless `self > 0`.
    pub fn ceil_log2(&self) -> i64 {
        assert!(self.is_positive(), "ceil_log2 of a non-positive value");
        let a = self.numer().bits() as i64;
        let b = self.denom().bits() as i64;
        // self lies strictly between 2^(a-b-1) and 2^(a-b+1)
        if self.le_pow2(a - b) {
            a - b
        } else {
            a - b + 1
        }
    }

    /// Whether `max(|p|, q) <= 2^λ`.
    pub fn is_lambda_precise(&self, lambda: u32) -> bool {
        let bound = BigInt::one() << (lambda as usize);
        self.numer().abs() <= bound && self.denom() <= bound
    }

    /// Bits needed for the larger of `|p|` and `q`.
    pub fn bits(&self) -> u64 {
        self.numer().bits().max(self.denom().bits())
    }

    /// Approximate value, for reports only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// `(sign, |p|, q)` with `sign` true for negative values.
    pub fn parts(&self) -> (bool, BigInt, BigInt) {
        let n = self.numer();
        (n.sign() == Sign::Minus, n.abs(), self.denom())
    }

    pub fn min(self, other: Rational) -> Rational {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Rational) -> Rational {
        if other > self {
            other
        } else {
            self
        }
    }
}

fn add(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small(n1, d1), Repr::Small(n2, d2)) => {
            if d1 == d2 {
                Rational::from_i128(*n1 as i128 + *n2 as i128, *d1 as i128)
            } else {
                let n = *n1 as i128 * *d2 as i128 + *n2 as i128 * *d1 as i128;
                Rational::from_i128(n, *d1 as i128 * *d2 as i128)
            }
        }
        _ => Rational::from_big(a.to_big() + b.to_big()),
    }
}

fn mul(a: &Rational, b: &Rational) -> Rational {
    match (&a.0, &b.0) {
        (Repr::Small(n1, d1), Repr::Small(n2, d2)) => {
            Rational::from_i128(*n1 as i128 * *n2 as i128, *d1 as i128 * *d2 as i128)
        }
        _ => Rational::from_big(a.to_big() * b.to_big()),
    }
}

fn div(a: &Rational, b: &Rational) -> Rational {
    assert!(!b.is_zero(), "division by zero");
    match (&a.0, &b.0) {
        (Repr::Small(n1, d1), Repr::Small(n2, d2)) => {
            Rational::from_i128(*n1 as i128 * *d2 as i128, *d1 as i128 * *n2 as i128)
        }
        _ => Rational::from_big(a.to_big() / b.to_big()),
    }
}

fn neg(a: &Rational) -> Rational {
    match &a.0 {
        Repr::Small(n, d) => Rational(Repr::Small(-n, *d)),
        Repr::Big(r) => Rational::from_big(-r.clone()),
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $f:ident, $atr:ident, $amethod:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $f(self, rhs)
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $f(self, &rhs)
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $f(&self, rhs)
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $f(&self, &rhs)
            }
        }
        impl $atr<&Rational> for Rational {
            fn $amethod(&mut self, rhs: &Rational) {
                *self = $f(self, rhs);
            }
        }
        impl $atr<Rational> for Rational {
            fn $amethod(&mut self, rhs: Rational) {
                *self = $f(self, &rhs);
            }
        }
    };
}

fn sub(a: &Rational, b: &Rational) -> Rational {
    add(a, &neg(b))
}

binop!(Add, add, add, AddAssign, add_assign);
binop!(Sub, sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, mul, MulAssign, mul_assign);
binop!(Div, div, div, DivAssign, div_assign);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg(&self)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg(self)
    }
}

impl Zero for Rational {
    fn zero() -> Rational {
        Rational(Repr::Small(0, 1))
    }
    fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }
}

impl One for Rational {
    fn one() -> Rational {
        Rational(Repr::Small(1, 1))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Rational) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(n1, d1), Repr::Small(n2, d2)) => {
                (*n1 as i128 * *d2 as i128).cmp(&(*n2 as i128 * *d1 as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for Rational {
    fn default() -> Rational {
        Rational::zero()
    }
}

macro_rules! from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Rational {
            fn from(v: $t) -> Rational {
                Rational::from_i128(v as i128, 1)
            }
        }
    )*};
}

from_int!(i32, i64, u8, u32, u64, usize);

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Rational {
        Rational::integer(v)
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Rational {
        Rational::from_big(v)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p/q`, a bare integer `p`, or an exact decimal like `0.05`.
    fn from_str(s: &str) -> Result<Rational, ParseRationalError> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        if let Some((int, frac)) = t.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || t.contains('/') {
                return Err(err());
            }
            let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| err())?;
            return Ok(Rational::new(digits, BigInt::from(10u32).pow(frac.len() as u32)));
        }
        let (p, q) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (t, "1"),
        };
        let p: BigInt = p.parse().map_err(|_| err())?;
        let q: BigInt = q.parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        Ok(Rational::new(p, q))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `2^-λ * floor(2^λ * y)`.
pub fn floor_lambda(y: &Rational, lambda: u32) -> Rational {
    y.floor_lambda(lambda)
}

/// `ceil(log2(x))` for `x > 0`; parameter formulas round logarithms up.
pub fn ceil_log2(x: &Rational) -> i64 {
    x.ceil_log2()
}
