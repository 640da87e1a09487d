//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! Set functions, market formulas and the simplex solver are written once
//! against [`Scalar`]. The exact instantiation ([`Rational`]) compares with
//! zero tolerance; the floating instantiations use a small absolute
//! tolerance so the same code can be reused for numeric post-processing.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Field-like number type usable by the set-function algebra and the
/// simplex solver.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Absolute tolerance used for sign tests. Zero for exact types.
    fn tolerance() -> Self;

    /// True when the type performs exact arithmetic.
    fn is_exact() -> bool;

    /// Canonical textual form (`"p/q"` for rationals, shortest round-trip
    /// decimal for floats).
    fn render(&self) -> String;

    fn parse_scalar(s: &str) -> Option<Self>;

    fn approx_zero(&self) -> bool {
        self.abs() <= Self::tolerance()
    }

    fn definitely_positive(&self) -> bool {
        *self > Self::tolerance()
    }

    fn definitely_negative(&self) -> bool {
        *self < -Self::tolerance()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).approx_zero()
    }

    fn from_usize(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("usize fits every scalar type")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `self −= a·b`; the exact type avoids the intermediate clones.
    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self = self.clone() - a.clone() * b.clone();
    }

    fn div_assign_by(&mut self, d: &Self) {
        *self = self.clone() / d.clone();
    }

    /// `2^k` as a scalar.
    fn pow2(k: u32) -> Self {
        let mut out = Self::one();
        let two = Self::one() + Self::one();
        for _ in 0..k {
            out = out * two.clone();
        }
        out
    }
}

impl Scalar for Rational {
    fn tolerance() -> Self {
        Rational::zero()
    }

    fn is_exact() -> bool {
        true
    }

    fn render(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_scalar(s: &str) -> Option<Self> {
        parse_rational(s)
    }

    fn approx_zero(&self) -> bool {
        self.is_zero()
    }

    fn definitely_positive(&self) -> bool {
        self.is_positive()
    }

    fn definitely_negative(&self) -> bool {
        self.is_negative()
    }

    fn sub_mul_assign(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }

    fn div_assign_by(&mut self, d: &Self) {
        *self /= d;
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }

    fn is_exact() -> bool {
        false
    }

    fn render(&self) -> String {
        format!("{self}")
    }

    fn parse_scalar(s: &str) -> Option<Self> {
        match parse_rational(s) {
            Some(q) => q.to_f64(),
            None => f64::from_str(s.trim()).ok(),
        }
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-5
    }

    fn is_exact() -> bool {
        false
    }

    fn render(&self) -> String {
        format!("{self}")
    }

    fn parse_scalar(s: &str) -> Option<Self> {
        match parse_rational(s) {
            Some(q) => q.to_f32(),
            None => f32::from_str(s.trim()).ok(),
        }
    }
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.25"` into an
/// exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).ok()?;
        let den = BigInt::from_str(den.trim()).ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int_digits}{frac_part}");
        let mut num = BigInt::from_str_radix(if digits.is_empty() { "0" } else { &digits }, 10).ok()?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
        return Some(Rational::new(num, den));
    }
    BigInt::from_str(s).ok().map(Rational::from_integer)
}

/// Shorthand used all over the tests and golden tables: `rat(15, 105)`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Converts between scalar types by way of `f64` (lossy for rationals).
pub fn to_f64_vec<T: Scalar>(values: &[T]) -> Vec<f64> {
    values.iter().map(Scalar::to_f64_lossy).collect()
}

/// Renders with a fixed denominator when it divides evenly, e.g. `15/105`
/// instead of the reduced `1/7`.
pub fn render_with_denominator(value: &Rational, denominator: Option<u64>) -> String {
    if let Some(d) = denominator {
        let d = BigInt::from(d);
        let scaled = value * Rational::from_integer(d.clone());
        if scaled.is_integer() {
            return format!("{}/{}", scaled.to_integer(), d);
        }
    }
    if value.is_integer() {
        return value.to_integer().to_string();
    }
    format!("{}/{}", value.numer(), value.denom())
}
