//! Real constants with certified enclosures.
//!
//! CLI and report surfaces describe reals symbolically (`sqrt2-1`, `pi-3`,
//! `3/2`, `0.125`, `1.4142135~`). Each constant can be enclosed in a
//! [`DyadicInterval`] at any requested precision, so downstream floor and
//! membership decisions stay certified.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::interval::{self, decimal_to_ratio, DyadicInterval};

/// A real number given in closed form: `mul * base + add` where the base is
/// `1`, `sqrt(k)`, or `pi`, or a decimal approximation with an explicit
/// radius.
#[derive(Clone, Debug, PartialEq)]
pub enum RealConstant {
    Rational(BigRational),
    Sqrt {
        k: u64,
        mul: BigRational,
        add: BigRational,
    },
    Pi {
        mul: BigRational,
        add: BigRational,
    },
    /// `value ± radius`, e.g. a decimal literal of limited precision.
    Approx {
        value: BigRational,
        radius: BigRational,
    },
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("cannot parse real constant `{0}`")]
pub struct ParseRealError(pub String);

impl RealConstant {
    pub fn zero() -> Self {
        RealConstant::Rational(BigRational::zero())
    }

    pub fn from_integer(n: i64) -> Self {
        RealConstant::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        RealConstant::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `sqrt(2) - 1`
    pub fn sqrt2_minus_1() -> Self {
        RealConstant::Sqrt {
            k: 2,
            mul: BigRational::one(),
            add: -BigRational::one(),
        }
    }

    /// `(sqrt(5) - 1) / 2`, the golden-ratio fractional part.
    pub fn golden() -> Self {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        RealConstant::Sqrt {
            k: 5,
            mul: half.clone(),
            add: -half,
        }
    }

    /// `pi - 3`
    pub fn pi_minus_3() -> Self {
        RealConstant::Pi {
            mul: BigRational::one(),
            add: BigRational::from_integer(BigInt::from(-3)),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            RealConstant::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Certified enclosure at the given precision.
    pub fn enclose(&self, prec: u32) -> DyadicInterval {
        match self {
            RealConstant::Rational(r) => DyadicInterval::from_ratio(r, prec),
            RealConstant::Sqrt { k, mul, add } => {
                let base = interval::sqrt_integer(&BigUint::from(*k), prec + 16);
                affine(&base, mul, add, prec)
            }
            RealConstant::Pi { mul, add } => {
                let base = interval::pi(prec + 16);
                affine(&base, mul, add, prec)
            }
            RealConstant::Approx { value, radius } => {
                let lo = DyadicInterval::from_ratio(&(value - radius), prec);
                let hi = DyadicInterval::from_ratio(&(value + radius), prec);
                lo.hull(&hi)
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.enclose(96).to_f64()
    }
}

fn affine(
    base: &DyadicInterval,
    mul: &BigRational,
    add: &BigRational,
    prec: u32,
) -> DyadicInterval {
    base.mul_ratio(mul)
        .add(&DyadicInterval::from_ratio(add, prec))
        .round_to(prec)
}

fn fmt_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for RealConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealConstant::Rational(r) => write!(f, "{}", fmt_ratio(r)),
            RealConstant::Sqrt { k, mul, add } => {
                write!(f, "{}*sqrt{}", fmt_ratio(mul), k)?;
                if !add.is_zero() {
                    write!(f, "{:+}", RatSigned(add))?;
                }
                Ok(())
            }
            RealConstant::Pi { mul, add } => {
                write!(f, "{}*pi", fmt_ratio(mul))?;
                if !add.is_zero() {
                    write!(f, "{:+}", RatSigned(add))?;
                }
                Ok(())
            }
            RealConstant::Approx { value, radius } => {
                write!(f, "{}~(±{})", fmt_ratio(value), fmt_ratio(radius))
            }
        }
    }
}

struct RatSigned<'a>(&'a BigRational);

impl fmt::Display for RatSigned<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_negative() {
            write!(f, "-{}", fmt_ratio(&-self.0.clone()))
        } else {
            write!(f, "+{}", fmt_ratio(self.0))
        }
    }
}

impl FromStr for RealConstant {
    type Err = ParseRealError;

    /// Accepted forms: `sqrt2-1`, `golden`, `pi-3`, `sqrt<k>[±rational]`,
    /// `pi[±rational]`, `p/q`, decimal, and `<decimal>~` for an inexact
    /// constant with half-last-digit radius.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || ParseRealError(s.to_string());
        match s {
            "golden" => return Ok(RealConstant::golden()),
            "sqrt2-1" => return Ok(RealConstant::sqrt2_minus_1()),
            "pi-3" => return Ok(RealConstant::pi_minus_3()),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("sqrt") {
            let (k_str, shift) = split_shift(rest);
            let k: u64 = k_str.parse().map_err(|_| err())?;
            let add = parse_shift(shift).ok_or_else(err)?;
            return Ok(RealConstant::Sqrt {
                k,
                mul: BigRational::one(),
                add,
            });
        }
        if let Some(rest) = s.strip_prefix("pi") {
            let add = parse_shift(rest).ok_or_else(err)?;
            return Ok(RealConstant::Pi {
                mul: BigRational::one(),
                add,
            });
        }
        if let Some(body) = s.strip_suffix('~') {
            let value = decimal_to_ratio(body).ok_or_else(err)?;
            let digits = body.split_once('.').map(|(_, f)| f.len()).unwrap_or(0);
            let radius = BigRational::new(
                BigInt::one(),
                BigInt::from(2) * BigInt::from(10u32).pow(digits as u32),
            );
            return Ok(RealConstant::Approx { value, radius });
        }
        if let Some((num, den)) = s.split_once('/') {
            let n: BigInt = num.trim().parse().map_err(|_| err())?;
            let d: BigInt = den.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(RealConstant::Rational(BigRational::new(n, d)));
        }
        decimal_to_ratio(s)
            .map(RealConstant::Rational)
            .ok_or_else(err)
    }
}

/// Split `"5-1"` into `("5", "-1")`; the shift may be empty.
fn split_shift(s: &str) -> (&str, &str) {
    match s.find(['+', '-']) {
        Some(i) => s.split_at(i),
        None => (s, ""),
    }
}

fn parse_shift(s: &str) -> Option<BigRational> {
    if s.is_empty() {
        return Some(BigRational::zero());
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let r = if let Some((num, den)) = body.split_once('/') {
        let n: BigInt = num.parse().ok()?;
        let d: BigInt = den.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        BigRational::new(n, d)
    } else {
        decimal_to_ratio(body)?
    };
    Some(if neg { -r } else { r })
}
