//! Exact arithmetic in the quadratic field ℚ(√2).
//!
//! Every coordinate map used on the quartic potentials has entries in
//! `{0, ±1, ±1/√2}`, so expanded polynomials stay representable as
//! `p + q·√2` with rational `p` and `q`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// An element `p + q·√2` of ℚ(√2).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ExactCoeff {
    p: BigRational,
    q: BigRational,
}

impl ExactCoeff {
    pub fn new(p: BigRational, q: BigRational) -> Self {
        Self { p, q }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(n, 1)
    }

    /// The rational `num/den`. Panics if `den == 0`.
    pub fn rational(num: i64, den: i64) -> Self {
        Self {
            p: BigRational::new(BigInt::from(num), BigInt::from(den)),
            q: BigRational::zero(),
        }
    }

    pub fn sqrt2() -> Self {
        Self {
            p: BigRational::zero(),
            q: BigRational::one(),
        }
    }

    /// `1/√2 = √2/2`.
    pub fn inv_sqrt2() -> Self {
        Self {
            p: BigRational::zero(),
            q: BigRational::new(BigInt::from(1), BigInt::from(2)),
        }
    }

    /// Parses an exact decimal literal such as `"0.10"`, `"-3"` or `"2e6"`.
    pub fn from_decimal_str(s: &str) -> Result<Self, ParseError> {
        Ok(Self {
            p: parse_decimal_rational(s)?,
            q: BigRational::zero(),
        })
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.p
    }

    pub fn sqrt2_part(&self) -> &BigRational {
        &self.q
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    /// Galois conjugate `p − q·√2`.
    pub fn conjugate(&self) -> Self {
        Self {
            p: self.p.clone(),
            q: -self.q.clone(),
        }
    }

    /// Field norm `p² − 2q²`, the product with the conjugate.
    pub fn norm(&self) -> BigRational {
        &self.p * &self.p - BigRational::from_integer(BigInt::from(2)) * &self.q * &self.q
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // p² − 2q² vanishes only at zero because √2 is irrational.
        let n = self.norm();
        let c = self.conjugate();
        Some(Self {
            p: c.p / &n,
            q: c.q / n,
        })
    }

    /// Exact sign of the real number `p + q·√2`.
    pub fn signum(&self) -> Ordering {
        let sp = self.p.cmp(&BigRational::zero());
        let sq = self.q.cmp(&BigRational::zero());
        match (sp, sq) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (a, b) if a == b => a,
            // Opposite signs: compare p² with 2q².
            (a, _) => {
                let p2 = &self.p * &self.p;
                let q2 = BigRational::from_integer(BigInt::from(2)) * &self.q * &self.q;
                match p2.cmp(&q2) {
                    Ordering::Greater => a,
                    Ordering::Less => a.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.p) + rational_to_f64(&self.q) * std::f64::consts::SQRT_2
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Formats a rational as `"num/den"`, always with an explicit denominator.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseError> {
    let s = s.trim();
    let bad = || ParseError::Rational(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

/// Parses a decimal literal (`[-]digits[.digits][e[-]digits]`) exactly.
pub fn parse_decimal_rational(s: &str) -> Result<BigRational, ParseError> {
    let (mantissa, exponent) = split_decimal(s)?;
    let ten = BigInt::from(10);
    let (num, scale) = mantissa;
    let shift = exponent - scale as i64;
    let mag = num_traits::pow(ten, shift.unsigned_abs() as usize);
    Ok(if shift >= 0 {
        BigRational::from_integer(num * mag)
    } else {
        BigRational::new(num, mag)
    })
}

/// Splits a decimal literal into `((integer digits, digits after the point), exponent)`.
pub(crate) fn split_decimal(s: &str) -> Result<((BigInt, u32), i64), ParseError> {
    let t = s.trim();
    let bad = || ParseError::Decimal(s.to_string());
    let (m, e) = match t.find(['e', 'E']) {
        Some(k) => (&t[..k], t[k + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, m) = match m.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, m.strip_prefix('+').unwrap_or(m)),
    };
    let (int_part, frac_part) = m.split_once('.').unwrap_or((m, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut n = BigInt::from_str(&digits).map_err(|_| bad())?;
    if neg {
        n = -n;
    }
    Ok(((n, frac_part.len() as u32), e))
}

impl Zero for ExactCoeff {
    fn zero() -> Self {
        Self {
            p: BigRational::zero(),
            q: BigRational::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }
}

impl One for ExactCoeff {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl From<i64> for ExactCoeff {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for ExactCoeff {
    fn from(p: BigRational) -> Self {
        Self {
            p,
            q: BigRational::zero(),
        }
    }
}

impl Add<&ExactCoeff> for &ExactCoeff {
    type Output = ExactCoeff;
    fn add(self, rhs: &ExactCoeff) -> ExactCoeff {
        ExactCoeff {
            p: &self.p + &rhs.p,
            q: &self.q + &rhs.q,
        }
    }
}

impl Sub<&ExactCoeff> for &ExactCoeff {
    type Output = ExactCoeff;
    fn sub(self, rhs: &ExactCoeff) -> ExactCoeff {
        ExactCoeff {
            p: &self.p - &rhs.p,
            q: &self.q - &rhs.q,
        }
    }
}

impl Mul<&ExactCoeff> for &ExactCoeff {
    type Output = ExactCoeff;
    fn mul(self, rhs: &ExactCoeff) -> ExactCoeff {
        let two = BigRational::from_integer(BigInt::from(2));
        ExactCoeff {
            p: &self.p * &rhs.p + two * &self.q * &rhs.q,
            q: &self.p * &rhs.q + &self.q * &rhs.p,
        }
    }
}

impl Div<&ExactCoeff> for &ExactCoeff {
    type Output = ExactCoeff;
    /// Panics on division by zero, like the rational division it wraps.
    fn div(self, rhs: &ExactCoeff) -> ExactCoeff {
        let inv = rhs.inverse().expect("division by zero in ExactCoeff");
        self * &inv
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<ExactCoeff> for ExactCoeff {
            type Output = ExactCoeff;
            fn $m(self, rhs: ExactCoeff) -> ExactCoeff {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&ExactCoeff> for ExactCoeff {
            type Output = ExactCoeff;
            fn $m(self, rhs: &ExactCoeff) -> ExactCoeff {
                (&self).$m(rhs)
            }
        }
        impl $tr<ExactCoeff> for &ExactCoeff {
            type Output = ExactCoeff;
            fn $m(self, rhs: ExactCoeff) -> ExactCoeff {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&ExactCoeff> for ExactCoeff {
    fn add_assign(&mut self, rhs: &ExactCoeff) {
        self.p += &rhs.p;
        self.q += &rhs.q;
    }
}

impl SubAssign<&ExactCoeff> for ExactCoeff {
    fn sub_assign(&mut self, rhs: &ExactCoeff) {
        self.p -= &rhs.p;
        self.q -= &rhs.q;
    }
}

impl MulAssign<&ExactCoeff> for ExactCoeff {
    fn mul_assign(&mut self, rhs: &ExactCoeff) {
        *self = &*self * rhs;
    }
}

impl Neg for ExactCoeff {
    type Output = ExactCoeff;
    fn neg(self) -> ExactCoeff {
        ExactCoeff {
            p: -self.p,
            q: -self.q,
        }
    }
}

impl Neg for &ExactCoeff {
    type Output = ExactCoeff;
    fn neg(self) -> ExactCoeff {
        -self.clone()
    }
}

impl fmt::Display for ExactCoeff {
    /// `3/2`, `sqrt(2)/2`, `1 - 3*sqrt(2)`, ...
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn surd(q: &BigRational) -> String {
            let n = q.numer().abs();
            let d = q.denom();
            let head = if n.is_one() {
                "sqrt(2)".to_string()
            } else {
                format!("{n}*sqrt(2)")
            };
            if d.is_one() {
                head
            } else {
                format!("{head}/{d}")
            }
        }
        match (self.p.is_zero(), self.q.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.p),
            (true, false) => {
                let sign = if self.q.is_negative() { "-" } else { "" };
                write!(f, "{sign}{}", surd(&self.q))
            }
            (false, false) => {
                let sign = if self.q.is_negative() { "-" } else { "+" };
                write!(f, "{} {sign} {}", self.p, surd(&self.q))
            }
        }
    }
}
