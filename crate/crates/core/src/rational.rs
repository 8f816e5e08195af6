//! Exact arbitrary-precision rationals.
//!
//! Every probability, matrix entry and answer in this crate is a [`Rational`].
//! The value is always kept in canonical form (reduced, positive denominator,
//! zero as `0/1`), so structural equality coincides with numeric equality.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Canonical exact fraction.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`: expected `p/q` or an integer")]
pub struct ParseRationalError(pub String);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// Builds `num/den` and reduces it. Panics on a zero denominator.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// True when the value lies in the closed unit interval.
    pub fn is_probability(&self) -> bool {
        !self.is_negative() && self.0 <= BigRational::one()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    /// Total bit length of numerator and denominator.
    pub fn bit_size(&self) -> u64 {
        self.numer().bits() + self.denom().bits()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with `digits` significant digits, rounding half to even.
    /// An ellipsis is appended when the shown digits are not the exact value.
    pub fn to_decimal(&self, digits: usize) -> String {
        to_decimal(self, digits.max(1))
    }
}

fn to_decimal(x: &Rational, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let negative = x.is_negative();
    let mag = x.abs();
    let ten = BigInt::from(10);

    // 10^e <= mag < 10^(e+1)
    let mut e = estimate_exponent(&mag);
    loop {
        let lo = pow10(e);
        let hi = pow10(e + 1);
        if mag < lo {
            e -= 1;
        } else if mag >= hi {
            e += 1;
        } else {
            break;
        }
    }

    let shift = digits as i64 - 1 - e;
    let scaled = &mag.0 * pow10(shift).0;
    let (mut n, exact) = round_half_even(&scaled);
    if n == num_traits::pow(ten.clone(), digits) {
        // rounding carried into a new leading digit
        n /= &ten;
        e += 1;
    }
    let shift = digits as i64 - 1 - e;

    let mut text = n.to_string();
    let body = if shift <= 0 {
        text.extend(std::iter::repeat_n('0', (-shift) as usize));
        text
    } else {
        let shift = shift as usize;
        if text.len() <= shift {
            let pad = shift - text.len();
            format!("0.{}{}", "0".repeat(pad), text)
        } else {
            let split = text.len() - shift;
            format!("{}.{}", &text[..split], &text[split..])
        }
    };
    let body =
        if exact && body.contains('.') { body.trim_end_matches('0').trim_end_matches('.').to_string() } else { body };
    let sign = if negative { "-" } else { "" };
    let tail = if exact { "" } else { "…" };
    format!("{sign}{body}{tail}")
}

fn estimate_exponent(mag: &Rational) -> i64 {
    // log10(2) ~ 0.30103; the caller corrects any off-by-one.
    let bits = mag.numer().bits() as i64 - mag.denom().bits() as i64;
    (bits as f64 * std::f64::consts::LOG10_2).floor() as i64
}

fn pow10(e: i64) -> Rational {
    let p = num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize);
    if e >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(1, p)
    }
}

/// Rounds a non-negative rational to the nearest integer, ties to even.
fn round_half_even(x: &BigRational) -> (BigInt, bool) {
    let (q, r) = x.numer().div_rem(x.denom());
    if r.is_zero() {
        return (q, true);
    }
    let twice: BigInt = &r * 2;
    let up = match twice.cmp(x.denom()) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => q.is_odd(),
    };
    (if up { q + 1 } else { q }, false)
}

impl fmt::Display for Rational {
    /// Always `p/q`, including integers (`0/1`, `1/1`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p/q` or a plain integer; no decimals, no signs on the denominator.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num_digits = num.strip_prefix('-').unwrap_or(num);
        if !digits(num_digits) || !digits(den) {
            return Err(err());
        }
        let n: BigInt = num.parse().map_err(|_| err())?;
        let d: BigInt = den.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        Ok(Rational::new(n, d))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

/// JSON shape `{"num": "...", "den": "..."}` with decimal-string integers.
#[derive(Serialize, Deserialize)]
struct WireRational {
    num: String,
    den: String,
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        WireRational { num: self.numer().to_string(), den: self.denom().to_string() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let wire = WireRational::deserialize(deserializer)?;
        let num: BigInt = wire.num.parse().map_err(D::Error::custom)?;
        let den: BigInt = wire.den.parse().map_err(D::Error::custom)?;
        if den.sign() != Sign::Plus {
            return Err(D::Error::custom("denominator must be positive"));
        }
        Ok(Rational::new(num, den))
    }
}
