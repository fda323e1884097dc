//! Exact-first scalar arithmetic.
//!
//! Payoffs and probabilities are kept as exact rationals whenever the input
//! supplies integer, decimal, or `p/q` literals, and silently degrade to `f64`
//! only when a float enters the computation. The stability characterisations
//! tested by this crate hinge on knife-edge equalities (an efficiency value
//! being *exactly* attained, a deviation gain *exactly* matching a cost
//! ratio), so exactness is not a luxury: a spurious 1e-16 makes the difference
//! between "certified" and "refuted".

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::Error;

/// A real number that is either an exact rational or an `f64` approximation.
///
/// Arithmetic is contagious: combining an exact value with an approximate one
/// yields an approximate one. Comparisons between two exact values are exact.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Approx(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact fraction `num/den`. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn approx(v: f64) -> Self {
        Scalar::Approx(v)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(v) => *v == 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Approx(v) => *v,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Approx(v) => Scalar::Approx(v.abs()),
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn recip(&self) -> Scalar {
        Scalar::one() / self.clone()
    }

    /// The same value as a float approximation.
    pub fn degraded(&self) -> Scalar {
        Scalar::Approx(self.to_f64())
    }

    /// Parses an exact literal: `-3`, `7/2`, `0.25`, `1e-3`, `2.5e2`.
    pub fn parse_exact(text: &str) -> Result<Scalar, Error> {
        let s = text.trim();
        if s.is_empty() {
            return Err(Error::Parse(format!("empty numeric literal `{text}`")));
        }
        if let Some((num, den)) = s.split_once('/') {
            let n = BigInt::from_str(num.trim())
                .map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
            let d = BigInt::from_str(den.trim())
                .map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            return Ok(Scalar::Exact(BigRational::new(n, d)));
        }
        // Split an optional exponent, then an optional decimal point.
        let (mantissa, exp) = match s.split_once(['e', 'E']) {
            Some((m, e)) => {
                let exp = i32::from_str(e)
                    .map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?;
                (m, exp)
            }
            None => (s, 0),
        };
        let (int_part, frac_part) = match mantissa.split_once('.') {
            Some((i, f)) => (i, f),
            None => (mantissa, ""),
        };
        let digits = format!("{int_part}{frac_part}");
        if digits.is_empty() || digits == "-" || digits == "+" {
            return Err(Error::Parse(format!("bad numeric literal `{s}`")));
        }
        let n =
            BigInt::from_str(&digits).map_err(|_| Error::Parse(format!("bad literal `{s}`")))?;
        let shift = exp - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let value = if shift >= 0 {
            BigRational::from_integer(n * num::pow::pow(ten, shift as usize))
        } else {
            BigRational::new(n, num::pow::pow(ten, (-shift) as usize))
        };
        Ok(Scalar::Exact(value))
    }

    /// Exact rendering: integers bare, other rationals as `p/q`, floats via `f64`.
    pub fn render(&self) -> String {
        match self {
            Scalar::Exact(r) => {
                if r.is_integer() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Approx(v) => format!("{v}"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => serializer.serialize_str(&self.render()),
            Scalar::Approx(v) => serializer.serialize_f64(*v),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .expect("NaN scalar in comparison"),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (a, b) => Scalar::Approx(a.to_f64() $op b.to_f64()),
                }
            }
        }
        impl<'a> $trait<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                self.clone() $op rhs.clone()
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                assert!(!b.is_zero(), "exact division by zero");
                Scalar::Exact(a / b)
            }
            (a, b) => Scalar::Approx(a.to_f64() / b.to_f64()),
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        self.clone() / rhs.clone()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Approx(v) => Scalar::Approx(-v),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

/// Tolerance-aware comparison helpers. A tolerance of exactly zero gives
/// exact comparisons; the defaults below pick zero in exact mode.
pub fn gt_tol(a: &Scalar, b: &Scalar, tol: &Scalar) -> bool {
    a.clone() > b.clone() + tol.clone()
}

pub fn ge_tol(a: &Scalar, b: &Scalar, tol: &Scalar) -> bool {
    a.clone() + tol.clone() >= b.clone()
}

pub fn eq_tol(a: &Scalar, b: &Scalar, tol: &Scalar) -> bool {
    (a - b).abs() <= *tol
}

/// Default membership tolerance: exact for rational data, 1e-9 for floats.
pub fn default_tol(exact: bool) -> Scalar {
    if exact {
        Scalar::zero()
    } else {
        Scalar::approx(1e-9)
    }
}
