//! Dual-mode arithmetic: arbitrary-precision rationals or `f64` with a fixed
//! comparison tolerance.
//!
//! Region counting and partition refinement need exact coincidence detection
//! (shift thresholds of different neurons routinely land on the same fraction),
//! so analysis code runs on [`Mode::Exact`] rationals. Bulk simulation can use
//! [`Mode::Float`]. A computation never mixes modes; mixing is a programming
//! error and panics.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Equality tolerance used by float-mode comparisons.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Arithmetic mode of a scalar, network, or whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Arbitrary-precision rational arithmetic, no rounding.
    Exact,
    /// Double-precision floats; equality up to [`FLOAT_TOLERANCE`].
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Float => write!(f, "float"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ParseScalarError {
    #[error("cannot parse {0:?} as a number")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("non-finite float {0:?}")]
    NonFinite(String),
}

/// A number in one of the two arithmetic modes.
#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::zero()),
            Mode::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::one()),
            Mode::Float => Scalar::Float(1.0),
        }
    }

    pub fn from_int(mode: Mode, v: i64) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(v))),
            Mode::Float => Scalar::Float(v as f64),
        }
    }

    /// The fraction `n/d`.
    pub fn ratio(mode: Mode, n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::new(BigInt::from(n), BigInt::from(d))),
            Mode::Float => Scalar::Float(n as f64 / d as f64),
        }
    }

    /// Converts a finite `f64`. In exact mode the conversion is lossless
    /// (every finite double is a dyadic rational).
    pub fn from_f64(mode: Mode, v: f64) -> Self {
        assert!(v.is_finite(), "non-finite float {v}");
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::from_float(v).expect("finite float")),
            Mode::Float => Scalar::Float(v),
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::Exact(r)
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().expect("rational representable as f64"),
            Scalar::Float(v) => *v,
        }
    }

    /// Lossless re-interpretation in the other mode where possible.
    /// Exact -> Float rounds to the nearest double.
    pub fn convert(&self, mode: Mode) -> Scalar {
        match (self, mode) {
            (Scalar::Exact(r), Mode::Exact) => Scalar::Exact(r.clone()),
            (Scalar::Float(v), Mode::Float) => Scalar::Float(*v),
            (Scalar::Exact(r), Mode::Float) => Scalar::Float(r.to_f64().expect("finite")),
            (Scalar::Float(v), Mode::Exact) => Scalar::from_f64(Mode::Exact, *v),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(v) => *v == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(v) => *v < 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Float(v) => *v > 0.0,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(v) => Scalar::Float(v.abs()),
        }
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.pow(exp as i32)),
            Scalar::Float(v) => Scalar::Float(v.powi(exp as i32)),
        }
    }

    /// Total order within one mode. Panics on mixed modes or NaN.
    pub fn compare(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => {
                a.partial_cmp(b).expect("NaN in float-mode scalar")
            }
            _ => panic!("compared scalars of different arithmetic modes"),
        }
    }

    /// Mode-aware equality: exact in rational mode, within
    /// [`FLOAT_TOLERANCE`] in float mode.
    pub fn approx_eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => (a - b).abs() <= FLOAT_TOLERANCE,
            _ => panic!("compared scalars of different arithmetic modes"),
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if self.compare(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if self.compare(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    /// Parses `"p/q"`, an integer, or a plain decimal like `"-0.75"`.
    /// Decimal strings become exact fractions in exact mode (`0.7` -> `7/10`).
    pub fn parse(mode: Mode, s: &str) -> Result<Scalar, ParseScalarError> {
        let s = s.trim();
        match mode {
            Mode::Float => {
                let v: f64 = s
                    .parse()
                    .map_err(|_| ParseScalarError::Invalid(s.to_string()))?;
                if !v.is_finite() {
                    return Err(ParseScalarError::NonFinite(s.to_string()));
                }
                Ok(Scalar::Float(v))
            }
            Mode::Exact => Ok(Scalar::Exact(parse_rational(s)?)),
        }
    }

    /// Canonical file representation: `"p/q"` in exact mode.
    pub fn to_repr_string(&self) -> String {
        match self {
            Scalar::Exact(r) => format!("{}/{}", r.numer(), r.denom()),
            Scalar::Float(v) => format!("{v}"),
        }
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational, ParseScalarError> {
    let invalid = || ParseScalarError::Invalid(s.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let numer: BigInt = n.trim().parse().map_err(|_| invalid())?;
        let denom: BigInt = d.trim().parse().map_err(|_| invalid())?;
        if denom.is_zero() {
            return Err(ParseScalarError::ZeroDenominator(s.to_string()));
        }
        return Ok(BigRational::new(numer, denom));
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return Err(invalid());
    }
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(invalid());
    }
    let digits: String = format!(
        "{}{}",
        if int_part.is_empty() { "0" } else { int_part },
        frac_part
    );
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(invalid());
    }
    let numer: BigInt = digits.parse().map_err(|_| invalid())?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(BigRational::new(BigInt::from(sign) * numer, denom))
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float(v) => write!(f, "{v}"),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a, 'b> $trait<&'b Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a $op b),
                    _ => panic!("mixed exact/float arithmetic"),
                }
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);
scalar_binop!(Div, div, /);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(v) => Scalar::Float(-v),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Sorts and removes duplicates under mode-aware equality.
pub fn sort_dedup(mut values: Vec<Scalar>) -> Vec<Scalar> {
    values.sort_by(|a, b| a.compare(b));
    let mut out: Vec<Scalar> = Vec::with_capacity(values.len());
    for v in values {
        if out.last().is_none_or(|last| !last.approx_eq(&v)) {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_has_no_rounding() {
        let m = Mode::Exact;
        let a = Scalar::ratio(m, 1, 3);
        let b = Scalar::ratio(m, 1, 6);
        assert_eq!(&a + &b, Scalar::ratio(m, 1, 2));
        assert_eq!(&a - &b, Scalar::ratio(m, 1, 6));
        assert_eq!(&a * &b, Scalar::ratio(m, 1, 18));
        assert_eq!(&a / &b, Scalar::from_int(m, 2));
    }

    #[test]
    fn float_equality_uses_tolerance() {
        let a = Scalar::Float(1.0);
        let b = Scalar::Float(1.0 + 1e-12);
        assert!(a.approx_eq(&b));
        let c = Scalar::Float(1.0 + 1e-6);
        assert!(!a.approx_eq(&c));
    }

    #[test]
    #[should_panic(expected = "mixed exact/float arithmetic")]
    fn mixing_modes_panics() {
        let _ = &Scalar::Float(1.0) + &Scalar::from_int(Mode::Exact, 1);
    }

    #[test]
    fn parse_decimal_is_exact() {
        let v = Scalar::parse(Mode::Exact, "0.7").unwrap();
        assert_eq!(v, Scalar::ratio(Mode::Exact, 7, 10));
        let v = Scalar::parse(Mode::Exact, "-3.25").unwrap();
        assert_eq!(v, Scalar::ratio(Mode::Exact, -13, 4));
        let v = Scalar::parse(Mode::Exact, "4/5").unwrap();
        assert_eq!(v, Scalar::ratio(Mode::Exact, 4, 5));
        assert!(Scalar::parse(Mode::Exact, "1/0").is_err());
        assert!(Scalar::parse(Mode::Exact, "abc").is_err());
    }

    #[test]
    fn repr_round_trip() {
        let v = Scalar::ratio(Mode::Exact, -22, 7);
        let s = v.to_repr_string();
        assert_eq!(s, "-22/7");
        assert_eq!(Scalar::parse(Mode::Exact, &s).unwrap(), v);
    }

    #[test]
    fn from_f64_exact_is_lossless() {
        let v = Scalar::from_f64(Mode::Exact, 0.1);
        // 0.1 is not a dyadic rational; conversion reproduces the double bit pattern.
        assert_eq!(v.to_f64(), 0.1);
        assert_ne!(v, Scalar::ratio(Mode::Exact, 1, 10));
    }

    #[test]
    fn sort_dedup_merges_close_floats() {
        let vals = vec![
            Scalar::Float(1.0),
            Scalar::Float(0.5),
            Scalar::Float(1.0 + 1e-13),
        ];
        let out = sort_dedup(vals);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn pow_handles_zero_base() {
        let z = Scalar::zero(Mode::Exact);
        assert_eq!(z.pow(0), Scalar::one(Mode::Exact));
        assert_eq!(z.pow(3), Scalar::zero(Mode::Exact));
    }
}
