//! Integer-part sequences `[g(n)]` with certified evaluation.
//!
//! Specs with an integer algorithm (`n^{p/q}`, `a n + b sqrt(n)`, rational
//! polynomials) are evaluated exactly. Transcendental specs are evaluated
//! with interval arithmetic at doubling precision until the floor is
//! unambiguous; hitting the precision cap is reported as an error carrying
//! the ambiguous enclosure, never guessed around.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::interval::{self, DyadicInterval};
use crate::real::RealConstant;

/// Precision schedule for interval evaluation: start at `start_bits`
/// fractional bits and double up to `max_bits`.
#[derive(Clone, Debug)]
pub struct PrecisionPolicy {
    pub start_bits: u32,
    pub max_bits: u32,
    /// Target width of reported fractional-part intervals.
    pub frac_tolerance_bits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            start_bits: 64,
            max_bits: 4096,
            frac_tolerance_bits: 32,
        }
    }
}

impl PrecisionPolicy {
    pub fn with_max_bits(max_bits: u32) -> Self {
        PrecisionPolicy {
            max_bits,
            ..Default::default()
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SeqError {
    #[error("precision exhausted at n={n}: value trapped in [{lo}, {hi}]")]
    PrecisionExhausted {
        n: u64,
        lo: BigRational,
        hi: BigRational,
    },
    #[error("g({n}) < 1 violates the sequence range invariant")]
    BelowOne { n: u64 },
    #[error("invalid sequence spec: {0}")]
    InvalidSpec(String),
    #[error("floor value at n={n} does not fit in i64")]
    ValueOverflow { n: u64 },
}

/// Closed rational interval, used for certified fractional parts.
#[derive(Clone, Debug, PartialEq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn point(v: BigRational) -> Self {
        RatInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        self.lo <= *v && *v <= self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2));
        mid.to_f64().unwrap_or(f64::NAN)
    }
}

/// Result of `[g(n)]`.
#[derive(Clone, Debug)]
pub struct FloorResult {
    pub value: BigInt,
    pub certified: bool,
    /// Certified enclosure of the fractional part `{g(n)}`.
    pub frac_interval: RatInterval,
}

/// Symbolic description of `g : N -> [1, oo)`.
///
/// `NLogN`, `NSqOverLog` and `LogPower` are clamped to 1 on the few initial
/// `n` where the raw formula dips below 1 (or is undefined at `n = 1`), so
/// the range invariant holds on all of `N`.
#[derive(Clone, Debug, PartialEq)]
pub enum SequenceSpec {
    /// `n^{p/q}` with gcd-reduced exponent.
    RationalPower { p: u32, q: u32 },
    /// `n^c` for a real `c >= 0`.
    RealPower { c: RealConstant },
    /// `n ln n`
    NLogN,
    /// `n^2 / ln n`
    NSqOverLog,
    /// `(ln n)^t` with `t > 1`.
    LogPower { t: RealConstant },
    /// `c_0 + c_1 n + ... + c_d n^d`
    RealPolynomial { coeffs: Vec<RealConstant> },
    /// `a n + b sqrt(n)`
    AffineSqrt { a: u64, b: u64 },
}

/// Floor of the q-th root: the unique `r` with `r^q <= x < (r+1)^q`.
pub fn integer_root(x: &BigUint, q: u32) -> BigUint {
    assert!(q >= 1, "root order must be at least 1");
    x.nth_root(q)
}

/// u64 fast path for square roots of u128 values.
pub fn isqrt_u128(x: u128) -> u128 {
    x.isqrt()
}

impl SequenceSpec {
    pub fn rational_power(p: u32, q: u32) -> Result<Self, SeqError> {
        if q == 0 {
            return Err(SeqError::InvalidSpec("power denominator must be >= 1".into()));
        }
        let g = gcd_u32(p.max(1), q);
        let g = if p == 0 { q } else { g };
        Ok(SequenceSpec::RationalPower { p: p / g, q: q / g })
    }

    pub fn real_power(c: RealConstant) -> Result<Self, SeqError> {
        // A rational exponent has an exact integer algorithm; route it there.
        if let Some(r) = c.as_rational() {
            if r.is_negative() {
                return Err(SeqError::InvalidSpec(
                    "power exponent must be nonnegative".into(),
                ));
            }
            let p = r.numer().to_u32();
            let q = r.denom().to_u32();
            if let (Some(p), Some(q)) = (p, q) {
                return Self::rational_power(p, q);
            }
        }
        if !c.enclose(128).is_strictly_positive() && c.as_rational().map_or(true, |r| !r.is_zero())
        {
            return Err(SeqError::InvalidSpec(
                "power exponent must be certifiably nonnegative".into(),
            ));
        }
        Ok(SequenceSpec::RealPower { c })
    }

    pub fn log_power(t: RealConstant) -> Result<Self, SeqError> {
        let iv = t.enclose(128).add_int(&BigInt::from(-1));
        if !iv.is_strictly_positive() {
            return Err(SeqError::InvalidSpec("log exponent must exceed 1".into()));
        }
        Ok(SequenceSpec::LogPower { t })
    }

    pub fn real_polynomial(mut coeffs: Vec<RealConstant>) -> Result<Self, SeqError> {
        while coeffs
            .last()
            .and_then(|c| c.as_rational())
            .map_or(false, |r| r.is_zero())
        {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(SeqError::InvalidSpec("polynomial has no coefficients".into()));
        }
        let spec = SequenceSpec::RealPolynomial { coeffs };
        // Range invariant at n = 1: g(1) >= 1.
        match spec.floor_eval(1, &PrecisionPolicy::default()) {
            Ok(_) => Ok(spec),
            Err(SeqError::BelowOne { .. }) => Err(SeqError::InvalidSpec(
                "polynomial value at n=1 is below 1".into(),
            )),
            Err(e) => Err(e),
        }
    }

    pub fn affine_sqrt(a: u64, b: u64) -> Result<Self, SeqError> {
        if a + b == 0 {
            return Err(SeqError::InvalidSpec(
                "affine-sqrt needs a + b >= 1 so that g(1) >= 1".into(),
            ));
        }
        Ok(SequenceSpec::AffineSqrt { a, b })
    }

    /// True when floors are computed by pure integer arithmetic.
    pub fn has_exact_path(&self) -> bool {
        match self {
            SequenceSpec::RationalPower { .. } | SequenceSpec::AffineSqrt { .. } => true,
            SequenceSpec::RealPolynomial { coeffs } => {
                coeffs.iter().all(|c| c.as_rational().is_some())
            }
            _ => false,
        }
    }

    /// Certified enclosure of `g(n)` at the given precision.
    pub fn eval_interval(&self, n: u64, prec: u32) -> Result<DyadicInterval, SeqError> {
        assert!(n >= 1, "sequences are indexed from 1");
        let ni = BigInt::from(n);
        match self {
            SequenceSpec::RationalPower { p, q } => {
                if n == 1 || *p == 0 {
                    return Ok(DyadicInterval::from_u64(1, prec));
                }
                let x = DyadicInterval::from_u64(n, prec);
                let e = DyadicInterval::from_ratio(
                    &BigRational::new(BigInt::from(*p), BigInt::from(*q)),
                    prec,
                );
                interval::pow(&x, &e, prec)
                    .ok_or_else(|| SeqError::InvalidSpec("power base not positive".into()))
            }
            SequenceSpec::RealPower { c } => {
                if n == 1 {
                    return Ok(DyadicInterval::from_u64(1, prec));
                }
                let x = DyadicInterval::from_u64(n, prec);
                let e = c.enclose(prec);
                // exp arguments beyond ~2^20 would allocate absurd mantissas.
                if e.to_f64() * (n as f64).ln() > 1_000_000.0 {
                    return Err(SeqError::ValueOverflow { n });
                }
                interval::pow(&x, &e, prec)
                    .ok_or_else(|| SeqError::InvalidSpec("power base not positive".into()))
            }
            SequenceSpec::NLogN => {
                if n == 1 {
                    return Ok(DyadicInterval::from_u64(1, prec));
                }
                let l = interval::ln(&DyadicInterval::from_u64(n, prec), prec).unwrap();
                Ok(l.mul_int(&ni))
            }
            SequenceSpec::NSqOverLog => {
                if n == 1 {
                    return Ok(DyadicInterval::from_u64(1, prec));
                }
                let l = interval::ln(&DyadicInterval::from_u64(n, prec), prec).unwrap();
                Ok(DyadicInterval::from_bigint(&(&ni * &ni), prec).div(&l))
            }
            SequenceSpec::LogPower { t } => {
                if n <= 2 {
                    // ln(1) = 0 and (ln 2)^t < 1; clamp to the range floor.
                    return Ok(DyadicInterval::from_u64(1, prec));
                }
                let l = interval::ln(&DyadicInterval::from_u64(n, prec), prec).unwrap();
                let te = t.enclose(prec);
                interval::pow(&l, &te, prec)
                    .ok_or_else(|| SeqError::InvalidSpec("log power base not positive".into()))
            }
            SequenceSpec::RealPolynomial { coeffs } => {
                let x = DyadicInterval::from_u64(n, prec);
                let mut acc = DyadicInterval::zero(prec);
                for c in coeffs.iter().rev() {
                    acc = acc.mul(&x).add(&c.enclose(prec));
                }
                Ok(acc)
            }
            SequenceSpec::AffineSqrt { a, b } => {
                let root = interval::sqrt_integer(&BigUint::from(n), prec);
                Ok(root
                    .mul_int(&BigInt::from(*b))
                    .add_int(&BigInt::from(a.checked_mul(n).expect("a*n overflow"))))
            }
        }
    }

    /// `[g(n)]` with certification.
    pub fn floor_eval(&self, n: u64, policy: &PrecisionPolicy) -> Result<FloorResult, SeqError> {
        assert!(n >= 1, "sequences are indexed from 1");
        match self {
            SequenceSpec::RationalPower { p, q } => {
                let x = BigUint::from(n).pow(*p);
                Ok(root_floor_result(&x, *q, policy))
            }
            SequenceSpec::AffineSqrt { a, b } => {
                let x = BigUint::from(*b) * BigUint::from(*b) * BigUint::from(n);
                let mut res = root_floor_result(&x, 2, policy);
                res.value += BigInt::from(*a) * BigInt::from(n);
                Ok(res)
            }
            SequenceSpec::RealPolynomial { coeffs }
                if coeffs.iter().all(|c| c.as_rational().is_some()) =>
            {
                let x = BigRational::from_integer(BigInt::from(n));
                let mut g = BigRational::zero();
                for c in coeffs.iter().rev() {
                    g = g * &x + c.as_rational().unwrap();
                }
                if g < BigRational::one() {
                    return Err(SeqError::BelowOne { n });
                }
                let value = g.numer().div_floor(g.denom());
                let frac = &g - BigRational::from_integer(value.clone());
                Ok(FloorResult {
                    value,
                    certified: true,
                    frac_interval: RatInterval::point(frac),
                })
            }
            _ => self.floor_eval_interval(n, policy),
        }
    }

    fn floor_eval_interval(
        &self,
        n: u64,
        policy: &PrecisionPolicy,
    ) -> Result<FloorResult, SeqError> {
        let mut prec = policy.start_bits;
        loop {
            let iv = self.eval_interval(n, prec)?;
            if let Some(f) = iv.floor() {
                if iv.width_within(policy.frac_tolerance_bits) {
                    if f < BigInt::one() {
                        return Err(SeqError::BelowOne { n });
                    }
                    let frac = RatInterval {
                        lo: iv.lo_ratio() - BigRational::from_integer(f.clone()),
                        hi: iv.hi_ratio() - BigRational::from_integer(f.clone()),
                    };
                    return Ok(FloorResult {
                        value: f,
                        certified: true,
                        frac_interval: frac,
                    });
                }
            }
            if prec >= policy.max_bits {
                return Err(SeqError::PrecisionExhausted {
                    n,
                    lo: iv.lo_ratio(),
                    hi: iv.hi_ratio(),
                });
            }
            prec = (prec * 2).min(policy.max_bits);
        }
    }

    /// Certified enclosure of the fractional part `{scale * g(n)}`.
    pub fn frac_eval(
        &self,
        n: u64,
        scale: &BigRational,
        policy: &PrecisionPolicy,
    ) -> Result<RatInterval, SeqError> {
        assert!(n >= 1);
        if scale.is_zero() {
            return Ok(RatInterval::point(BigRational::zero()));
        }
        match self {
            SequenceSpec::RationalPower { p, q } => {
                let x = BigUint::from(n).pow(*p);
                scaled_root_frac(&x, *q, scale, n, policy)
            }
            SequenceSpec::AffineSqrt { a, b } => {
                let x = BigUint::from(*b) * BigUint::from(*b) * BigUint::from(n);
                let linear = scale * BigRational::from_integer(BigInt::from(a.checked_mul(n).unwrap()));
                scaled_root_frac_with_offset(&x, 2, scale, &linear, n, policy)
            }
            SequenceSpec::RealPolynomial { coeffs }
                if coeffs.iter().all(|c| c.as_rational().is_some()) =>
            {
                let x = BigRational::from_integer(BigInt::from(n));
                let mut g = BigRational::zero();
                for c in coeffs.iter().rev() {
                    g = g * &x + c.as_rational().unwrap();
                }
                Ok(RatInterval::point(frac_of_rational(&(scale * g))))
            }
            _ => {
                let tol = BigRational::new(
                    BigInt::one(),
                    BigInt::one() << policy.frac_tolerance_bits,
                );
                let mut prec = policy.start_bits;
                loop {
                    let iv = self.eval_interval(n, prec)?;
                    let (mut lo, mut hi) = (iv.lo_ratio() * scale, iv.hi_ratio() * scale);
                    if lo > hi {
                        std::mem::swap(&mut lo, &mut hi);
                    }
                    let fl = lo.floor();
                    let same_floor = hi.clone().floor() == fl && hi != &fl + BigRational::one();
                    if same_floor && &hi - &lo <= tol {
                        return Ok(RatInterval {
                            lo: lo - fl.clone(),
                            hi: hi - fl,
                        });
                    }
                    if prec >= policy.max_bits {
                        return Err(SeqError::PrecisionExhausted { n, lo, hi });
                    }
                    prec = (prec * 2).min(policy.max_bits);
                }
            }
        }
    }

    /// Certified floors for `n = 1..=n_max`, as machine integers.
    pub fn floor_values(&self, n_max: u64, policy: &PrecisionPolicy) -> Result<Vec<i64>, SeqError> {
        let mut out = Vec::with_capacity(n_max as usize);
        match self {
            SequenceSpec::RationalPower { p, q } => {
                for n in 1..=n_max {
                    out.push(rational_power_floor_i64(n, *p, *q)?);
                }
            }
            SequenceSpec::AffineSqrt { a, b } => {
                let b2 = (*b as u128) * (*b as u128);
                for n in 1..=n_max {
                    let s = isqrt_u128(b2 * n as u128);
                    let v = (*a as u128)
                        .checked_mul(n as u128)
                        .and_then(|an| an.checked_add(s))
                        .ok_or(SeqError::ValueOverflow { n })?;
                    out.push(i64::try_from(v).map_err(|_| SeqError::ValueOverflow { n })?);
                }
            }
            _ => {
                for n in 1..=n_max {
                    let r = self.floor_eval(n, policy)?;
                    out.push(
                        r.value
                            .to_i64()
                            .ok_or(SeqError::ValueOverflow { n })?,
                    );
                }
            }
        }
        Ok(out)
    }
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    let mut a = a;
    let mut b = b;
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Floor of `n^{p/q}` through the u128 fast path where possible.
fn rational_power_floor_i64(n: u64, p: u32, q: u32) -> Result<i64, SeqError> {
    if p == 0 {
        return Ok(1);
    }
    let fits_u128 = (n.max(2) as f64).log2() * p as f64 <= 126.0;
    if fits_u128 {
        let x = (n as u128).pow(p);
        let r = match q {
            1 => x,
            2 => isqrt_u128(x),
            _ => {
                let big = BigUint::from(x).nth_root(q);
                big.to_u128().unwrap()
            }
        };
        return i64::try_from(r).map_err(|_| SeqError::ValueOverflow { n });
    }
    let x = BigUint::from(n).pow(p);
    integer_root(&x, q)
        .to_i64()
        .ok_or(SeqError::ValueOverflow { n })
}

fn frac_of_rational(v: &BigRational) -> BigRational {
    v - BigRational::from_integer(v.floor().to_integer())
}

/// FloorResult for `x^{1/q}` with a certified fractional enclosure.
fn root_floor_result(x: &BigUint, q: u32, policy: &PrecisionPolicy) -> FloorResult {
    let r = integer_root(x, q);
    let exact = r.pow(q) == *x;
    if exact {
        return FloorResult {
            value: BigInt::from(r),
            certified: true,
            frac_interval: RatInterval::point(BigRational::zero()),
        };
    }
    let mut extra = policy.frac_tolerance_bits.max(8);
    loop {
        let t = integer_root(&(x << (q * extra) as usize), q);
        let den = BigInt::one() << extra;
        let lo = BigRational::new(BigInt::from(t.clone()), den.clone())
            - BigRational::from_integer(BigInt::from(r.clone()));
        let hi = BigRational::new(BigInt::from(t) + BigInt::one(), den)
            - BigRational::from_integer(BigInt::from(r.clone()));
        // The root is irrational here, so the enclosure eventually moves
        // strictly inside [0, 1).
        if hi < BigRational::one() && lo >= BigRational::zero() {
            return FloorResult {
                value: BigInt::from(r),
                certified: true,
                frac_interval: RatInterval { lo, hi },
            };
        }
        extra *= 2;
    }
}

/// Fractional part of `scale * x^{1/q}` (plus an exact rational offset),
/// certified by root refinement.
fn scaled_root_frac(
    x: &BigUint,
    q: u32,
    scale: &BigRational,
    n: u64,
    policy: &PrecisionPolicy,
) -> Result<RatInterval, SeqError> {
    scaled_root_frac_with_offset(x, q, scale, &BigRational::zero(), n, policy)
}

fn scaled_root_frac_with_offset(
    x: &BigUint,
    q: u32,
    scale: &BigRational,
    offset: &BigRational,
    n: u64,
    policy: &PrecisionPolicy,
) -> Result<RatInterval, SeqError> {
    let r = integer_root(x, q);
    if r.pow(q) == *x {
        let v = scale * BigRational::from_integer(BigInt::from(r)) + offset;
        return Ok(RatInterval::point(frac_of_rational(&v)));
    }
    let tol = BigRational::new(BigInt::one(), BigInt::one() << policy.frac_tolerance_bits);
    let mut extra = policy.frac_tolerance_bits.max(8);
    loop {
        let t = integer_root(&(x << (q * extra) as usize), q);
        let den = BigInt::one() << extra;
        let a = scale * BigRational::new(BigInt::from(t.clone()), den.clone()) + offset;
        let b = scale * BigRational::new(BigInt::from(t) + BigInt::one(), den) + offset;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let fl = lo.floor();
        if hi.clone().floor() == fl && hi != &fl + BigRational::one() && &hi - &lo <= tol {
            return Ok(RatInterval {
                lo: lo - fl.clone(),
                hi: hi - fl,
            });
        }
        if extra >= policy.max_bits {
            return Err(SeqError::PrecisionExhausted { n, lo, hi });
        }
        extra = (extra * 2).min(policy.max_bits);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pol() -> PrecisionPolicy {
        PrecisionPolicy::default()
    }

    #[test]
    fn integer_root_examples() {
        assert_eq!(integer_root(&BigUint::from(8u32), 3), BigUint::from(2u32));
        assert_eq!(integer_root(&BigUint::from(125u32), 2), BigUint::from(11u32));
        assert_eq!(
            integer_root(&BigUint::from(10u64).pow(18), 2),
            BigUint::from(10u64).pow(9)
        );
    }

    #[test]
    fn rational_power_floor_examples() {
        let s = SequenceSpec::rational_power(3, 2).unwrap();
        let r4 = s.floor_eval(4, &pol()).unwrap();
        assert_eq!(r4.value, BigInt::from(8));
        assert!(r4.certified);
        assert!(r4.frac_interval.is_point());
        let r5 = s.floor_eval(5, &pol()).unwrap();
        assert_eq!(r5.value, BigInt::from(11));
        assert!(r5.certified);
        // 5^{3/2} = 11.1803...; the reported fractional enclosure must
        // contain the true value and respect the tolerance.
        assert!(r5.frac_interval.lo > BigRational::new(BigInt::from(1), BigInt::from(6)));
        assert!(r5.frac_interval.width() <= BigRational::new(BigInt::one(), BigInt::from(1u64 << 32)));
    }

    #[test]
    fn affine_sqrt_floor_examples() {
        let s = SequenceSpec::affine_sqrt(2, 2).unwrap();
        assert_eq!(s.floor_eval(2, &pol()).unwrap().value, BigInt::from(6));
        assert_eq!(s.floor_eval(1, &pol()).unwrap().value, BigInt::from(4));
    }

    #[test]
    fn nlogn_floor_example() {
        let s = SequenceSpec::NLogN;
        let r = s.floor_eval(3, &pol()).unwrap();
        assert_eq!(r.value, BigInt::from(3));
        assert!(r.certified);
    }

    // Floors 1..=30 frozen from 60-digit reference evaluation.
    #[test]
    fn transcendental_floor_tables() {
        let nlogn = [
            1, 1, 3, 5, 8, 10, 13, 16, 19, 23, 26, 29, 33, 36, 40, 44, 48, 52, 55, 59, 63, 68,
            72, 76, 80, 84, 88, 93, 97, 102,
        ];
        let nsq = [
            1, 5, 8, 11, 15, 20, 25, 30, 36, 43, 50, 57, 65, 74, 83, 92, 102, 112, 122, 133,
            144, 156, 168, 181, 194, 207, 221, 235, 249, 264,
        ];
        let logpow2 = [
            1, 1, 1, 1, 2, 3, 3, 4, 4, 5, 5, 6, 6, 6, 7, 7, 8, 8, 8, 8, 9, 9, 9, 10, 10, 10,
            10, 11, 11, 11,
        ];
        let lp = SequenceSpec::log_power(RealConstant::from_integer(2)).unwrap();
        for n in 1..=30u64 {
            assert_eq!(
                SequenceSpec::NLogN.floor_eval(n, &pol()).unwrap().value,
                BigInt::from(nlogn[(n - 1) as usize]),
                "nlogn at {n}"
            );
            assert_eq!(
                SequenceSpec::NSqOverLog.floor_eval(n, &pol()).unwrap().value,
                BigInt::from(nsq[(n - 1) as usize]),
                "nsqoverlog at {n}"
            );
            assert_eq!(
                lp.floor_eval(n, &pol()).unwrap().value,
                BigInt::from(logpow2[(n - 1) as usize]),
                "logpow2 at {n}"
            );
        }
    }

    #[test]
    fn irrational_polynomial_floors() {
        // sqrt(2) n^2 + sqrt(3) n, floors frozen from reference evaluation.
        let expected = [
            3, 9, 17, 29, 44, 61, 81, 104, 130, 158, 190, 224, 261, 301, 344, 389, 438, 489,
            543, 600,
        ];
        let spec = SequenceSpec::real_polynomial(vec![
            RealConstant::zero(),
            "sqrt3".parse().unwrap(),
            "sqrt2".parse().unwrap(),
        ])
        .unwrap();
        for n in 1..=20u64 {
            assert_eq!(
                spec.floor_eval(n, &pol()).unwrap().value,
                BigInt::from(expected[(n - 1) as usize]),
                "at {n}"
            );
        }
    }

    #[test]
    fn frac_eval_examples() {
        let aff = SequenceSpec::affine_sqrt(2, 2).unwrap();
        let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
        let f = aff.frac_eval(1, &quarter, &pol()).unwrap();
        assert!(f.is_point());
        assert_eq!(f.lo, BigRational::zero());

        let pow = SequenceSpec::rational_power(3, 2).unwrap();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let f4 = pow.frac_eval(4, &half, &pol()).unwrap();
        assert!(f4.is_point());
        assert_eq!(f4.lo, BigRational::zero());

        // {5^{3/2} / 2} = 0.59016994374947424...
        let f5 = pow.frac_eval(5, &half, &pol()).unwrap();
        assert!(!f5.is_point());
        let truth = interval::decimal_to_ratio("0.59016994374947424102").unwrap();
        assert!(f5.contains(&truth));
    }

    #[test]
    fn exact_polynomial_path() {
        // n^2 with rational coefficients is exact.
        let spec = SequenceSpec::real_polynomial(vec![
            RealConstant::zero(),
            RealConstant::zero(),
            RealConstant::from_integer(1),
        ])
        .unwrap();
        assert!(spec.has_exact_path());
        let r = spec.floor_eval(7, &pol()).unwrap();
        assert_eq!(r.value, BigInt::from(49));
        assert!(r.frac_interval.is_point());
    }

    #[test]
    fn precision_exhaustion_is_loud() {
        // Exponent 2 +- 1e-6: 2^c straddles 4 at every precision.
        let c = RealConstant::Approx {
            value: BigRational::from_integer(BigInt::from(2)),
            radius: BigRational::new(BigInt::one(), BigInt::from(1_000_000)),
        };
        let spec = SequenceSpec::real_power(c).unwrap();
        let policy = PrecisionPolicy {
            start_bits: 64,
            max_bits: 256,
            frac_tolerance_bits: 32,
        };
        match spec.floor_eval(2, &policy) {
            Err(SeqError::PrecisionExhausted { n: 2, lo, hi }) => {
                assert!(lo < BigRational::from_integer(BigInt::from(4)));
                assert!(hi > BigRational::from_integer(BigInt::from(4)));
            }
            other => panic!("expected precision exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn constructor_rejections() {
        assert!(SequenceSpec::rational_power(3, 0).is_err());
        assert!(SequenceSpec::affine_sqrt(0, 0).is_err());
        assert!(SequenceSpec::log_power(RealConstant::from_integer(1)).is_err());
        // g(1) = -5 < 1.
        assert!(
            SequenceSpec::real_polynomial(vec![RealConstant::from_integer(-5)]).is_err()
        );
        // Negative exponent can never satisfy g >= 1 beyond n = 1.
        assert!(SequenceSpec::real_power(RealConstant::from_ratio(-1, 2)).is_err());
    }

    #[test]
    fn below_one_detected_during_eval() {
        // 10 - 3n dips below 1 from n = 4 on.
        let spec = SequenceSpec::real_polynomial(vec![
            RealConstant::from_integer(10),
            RealConstant::from_integer(-3),
        ])
        .unwrap();
        assert_eq!(spec.floor_eval(1, &pol()).unwrap().value, BigInt::from(7));
        assert!(matches!(
            spec.floor_eval(4, &pol()),
            Err(SeqError::BelowOne { n: 4 })
        ));
    }

    #[test]
    fn floor_values_fast_path_matches_big_path() {
        let s = SequenceSpec::rational_power(3, 2).unwrap();
        let vals = s.floor_values(500, &pol()).unwrap();
        for n in 1..=500u64 {
            let direct = s.floor_eval(n, &pol()).unwrap().value;
            assert_eq!(BigInt::from(vals[(n - 1) as usize]), direct);
        }
    }

    #[test]
    fn real_power_routes_rational_exponent_to_exact_path() {
        let s = SequenceSpec::real_power("3/2".parse().unwrap()).unwrap();
        assert_eq!(s, SequenceSpec::rational_power(3, 2).unwrap());
    }
}
