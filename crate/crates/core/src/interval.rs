//! Dyadic interval arithmetic with outward rounding.
//!
//! A [`DyadicInterval`] stores `[lo, hi] * 2^-prec` with big-integer
//! endpoints. Every operation rounds outward, so an interval produced from
//! certified inputs always contains the true real value. Elementary
//! functions (`ln`, `exp`, `pi`, square roots) are computed by truncated
//! series in fixed point; truncation and rounding errors are tracked in
//! ulps and folded into the returned interval.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Guard bits used internally by the elementary functions.
const GUARD: u32 = 64;

/// Closed interval `[lo, hi] * 2^-prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn shr_floor(x: &BigInt, k: u32) -> BigInt {
    // BigInt >> shifts toward negative infinity, which is floor.
    x >> k
}

fn shr_ceil(x: &BigInt, k: u32) -> BigInt {
    -((-x) >> k)
}

fn div_floor_big(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::div_floor(a, b)
}

fn div_ceil_big(a: &BigInt, b: &BigInt) -> BigInt {
    -num_integer::Integer::div_floor(&(-a), b)
}

impl DyadicInterval {
    pub fn new(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        debug_assert!(lo <= hi);
        DyadicInterval { lo, hi, prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn lo_mantissa(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_mantissa(&self) -> &BigInt {
        &self.hi
    }

    /// Exact integer as a degenerate interval.
    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        let m = n << prec;
        DyadicInterval::new(m.clone(), m, prec)
    }

    pub fn from_u64(n: u64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(n), prec)
    }

    pub fn zero(prec: u32) -> Self {
        DyadicInterval::new(BigInt::zero(), BigInt::zero(), prec)
    }

    /// Tightest interval at `prec` containing the rational `r`.
    pub fn from_ratio(r: &BigRational, prec: u32) -> Self {
        let scaled_num = r.numer() << prec;
        let lo = div_floor_big(&scaled_num, r.denom());
        let hi = div_ceil_big(&scaled_num, r.denom());
        DyadicInterval::new(lo, hi, prec)
    }

    /// Re-round to a (usually smaller) precision.
    pub fn round_to(&self, prec: u32) -> Self {
        if prec == self.prec {
            return self.clone();
        }
        if prec > self.prec {
            let k = prec - self.prec;
            return DyadicInterval::new(&self.lo << k, &self.hi << k, prec);
        }
        let k = self.prec - prec;
        DyadicInterval::new(shr_floor(&self.lo, k), shr_ceil(&self.hi, k), prec)
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let p = self.prec.max(other.prec);
        (self.round_to(p), other.round_to(p))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        DyadicInterval::new(a.lo + b.lo, a.hi + b.hi, a.prec)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        DyadicInterval::new(a.lo - b.hi, a.hi - b.lo, a.prec)
    }

    pub fn neg(&self) -> Self {
        DyadicInterval::new(-&self.hi, -&self.lo, self.prec)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let p = a.prec;
        let c1 = &a.lo * &b.lo;
        let c2 = &a.lo * &b.hi;
        let c3 = &a.hi * &b.lo;
        let c4 = &a.hi * &b.hi;
        let lo = c1.clone().min(c2.clone()).min(c3.clone()).min(c4.clone());
        let hi = c1.max(c2).max(c3).max(c4);
        DyadicInterval::new(shr_floor(&lo, p), shr_ceil(&hi, p), p)
    }

    /// Division; the divisor interval must not contain zero.
    pub fn div(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        assert!(
            b.lo.is_positive() || b.hi.is_negative(),
            "division by an interval containing zero"
        );
        let p = a.prec;
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for num in [&a.lo, &a.hi] {
            for den in [&b.lo, &b.hi] {
                let scaled = num << p;
                let f = div_floor_big(&scaled, den);
                let c = div_ceil_big(&scaled, den);
                lo = Some(match lo {
                    Some(v) => v.min(f),
                    None => f,
                });
                hi = Some(match hi {
                    Some(v) => v.max(c),
                    None => c,
                });
            }
        }
        DyadicInterval::new(lo.unwrap(), hi.unwrap(), p)
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        if n.is_negative() {
            DyadicInterval::new(&self.hi * n, &self.lo * n, self.prec)
        } else {
            DyadicInterval::new(&self.lo * n, &self.hi * n, self.prec)
        }
    }

    pub fn mul_ratio(&self, r: &BigRational) -> Self {
        let (a, b) = if r.is_negative() {
            (&self.hi, &self.lo)
        } else {
            (&self.lo, &self.hi)
        };
        let lo = div_floor_big(&(a * r.numer()), r.denom());
        let hi = div_ceil_big(&(b * r.numer()), r.denom());
        DyadicInterval::new(lo, hi, self.prec)
    }

    pub fn add_int(&self, n: &BigInt) -> Self {
        let shifted = n << self.prec;
        DyadicInterval::new(&self.lo + &shifted, &self.hi + shifted, self.prec)
    }

    pub fn hull(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        DyadicInterval::new(a.lo.min(b.lo), a.hi.max(b.hi), a.prec)
    }

    /// Floor of the enclosed value, when unambiguous.
    pub fn floor(&self) -> Option<BigInt> {
        let fl = shr_floor(&self.lo, self.prec);
        let fh = shr_floor(&self.hi, self.prec);
        if fl == fh {
            Some(fl)
        } else {
            None
        }
    }

    pub fn width_ulps(&self) -> BigInt {
        &self.hi - &self.lo
    }

    /// True if `hi - lo <= 2^-bits`.
    pub fn width_within(&self, bits: u32) -> bool {
        if bits > self.prec {
            return self.width_ulps().is_zero();
        }
        self.width_ulps() <= (BigInt::one() << (self.prec - bits))
    }

    pub fn contains_ratio(&self, r: &BigRational) -> bool {
        let lo = BigRational::new(self.lo.clone(), BigInt::one() << self.prec);
        let hi = BigRational::new(self.hi.clone(), BigInt::one() << self.prec);
        lo <= *r && *r <= hi
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn lo_ratio(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.prec)
    }

    pub fn hi_ratio(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.prec)
    }

    /// Midpoint as f64; for reporting only, never for decisions.
    pub fn to_f64(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / BigInt::from(2);
        big_to_f64_scaled(&mid, self.prec)
    }
}

/// `m * 2^-prec` as f64, keeping only the leading 64 bits of `m`.
fn big_to_f64_scaled(m: &BigInt, prec: u32) -> f64 {
    let neg = m.is_negative();
    let mag = m.magnitude();
    let bits = mag.bits();
    let v = if bits <= 64 {
        mag.to_f64().unwrap_or(0.0) * 2f64.powi(-(prec as i32))
    } else {
        let shift = bits - 64;
        let top: BigUint = mag >> shift;
        top.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32 - prec as i32)
    };
    if neg {
        -v
    } else {
        v
    }
}

/// Scalar fixed-point value with an accumulated error bound in ulps.
struct FixErr {
    m: BigInt,
    err: BigInt,
}

impl FixErr {
    fn interval(self, prec_work: u32, prec_out: u32) -> DyadicInterval {
        DyadicInterval::new(&self.m - &self.err, &self.m + &self.err, prec_work)
            .round_to(prec_out)
    }
}

/// Enclosure of `sqrt(k)`.
pub fn sqrt_integer(k: &BigUint, prec: u32) -> DyadicInterval {
    let shifted: BigUint = k << (2 * prec);
    let s = shifted.sqrt();
    let exact = &s * &s == shifted;
    let lo = BigInt::from(s);
    let hi = if exact { lo.clone() } else { &lo + 1 };
    DyadicInterval::new(lo, hi, prec)
}

/// atanh series used by `ln`: returns `2 * sum_{j odd} s^j / j` where
/// `s = t/d <= 1/2` is given by exact fixed-point integers `t, d`.
fn atanh_series(t: &BigInt, d: &BigInt, w: u32) -> FixErr {
    debug_assert!(!t.is_negative() && t * BigInt::from(2) <= *d);
    let s = div_floor_big(&(t << w), d);
    let s2 = shr_floor(&(&s * &s), w);
    let mut sum = s.clone();
    let mut pw = s;
    let mut j = BigInt::from(1);
    let mut terms: u64 = 1;
    loop {
        pw = shr_floor(&(&pw * &s2), w);
        j += 2;
        let term = div_floor_big(&pw, &j);
        if term.is_zero() {
            break;
        }
        sum += term;
        terms += 1;
    }
    // One rounded division and one rounded product per term, plus a
    // truncation tail bounded by the first omitted term.
    FixErr {
        m: sum << 1,
        err: BigInt::from(8 * (terms + 2)),
    }
}

fn ln2_fix(w: u32) -> FixErr {
    // ln 2 = 2 atanh(1/3)
    atanh_series(&BigInt::one(), &BigInt::from(3), w)
}

/// Enclosure of `ln 2`.
pub fn ln2(prec: u32) -> DyadicInterval {
    let w = prec + GUARD;
    ln2_fix(w).interval(w, prec)
}

/// Enclosure of `ln(m * 2^-prec_in)` for a positive scalar mantissa.
fn ln_scalar(m: &BigInt, prec_in: u32, prec_out: u32) -> DyadicInterval {
    assert!(m.is_positive());
    let w = prec_out + GUARD;
    let bits = m.magnitude().bits() as i64;
    // m * 2^-prec_in = u * 2^shift with u in [1, 2)
    let shift = bits - 1 - prec_in as i64;
    let (u, u_err) = if w as i64 >= bits - 1 {
        (m << (w as i64 - (bits - 1)) as u32, 0u64)
    } else {
        (shr_floor(m, ((bits - 1) - w as i64) as u32), 1u64)
    };
    let one_w = BigInt::one() << w;
    // ln u = 2 atanh((u-1)/(u+1)); (u-1)/(u+1) in [0, 1/3]
    let t = &u - &one_w;
    let d = &u + &one_w;
    let mut atanh = atanh_series(&t, &d, w);
    // Slack for the rounding of u itself: |d ln/du| <= 1 on [1,2).
    atanh.err += BigInt::from(2 * u_err + 2);
    let ln2 = ln2_fix(w);
    let s = BigInt::from(shift);
    FixErr {
        m: atanh.m + &ln2.m * &s,
        err: atanh.err + ln2.err * s.abs(),
    }
    .interval(w, prec_out)
}

/// Enclosure of `ln x`; `None` unless the interval is certainly positive.
pub fn ln(x: &DyadicInterval, prec_out: u32) -> Option<DyadicInterval> {
    if !x.is_strictly_positive() {
        return None;
    }
    let a = ln_scalar(&x.lo, x.prec, prec_out);
    let b = ln_scalar(&x.hi, x.prec, prec_out);
    Some(a.hull(&b))
}

/// Enclosure of `exp(m * 2^-prec_in)` for a scalar mantissa.
///
/// The argument must satisfy `|x| < 2^20`; large arguments do not occur in
/// the sequence evaluations this crate performs.
fn exp_scalar(m: &BigInt, prec_in: u32, prec_out: u32) -> DyadicInterval {
    let w = prec_out + GUARD;
    let x_f64 = big_to_f64_scaled(m, prec_in);
    assert!(x_f64.abs() < 1_048_576.0, "exp argument out of range");
    let ln2 = ln2_fix(w);
    let mut k = (x_f64 / std::f64::consts::LN_2).round() as i64;
    // r = x - k ln2, adjusted until |r| <= 0.75.
    let x_w = if w >= prec_in {
        m << (w - prec_in)
    } else {
        shr_floor(m, prec_in - w)
    };
    let mut r = &x_w - &ln2.m * BigInt::from(k);
    let three_quarters = BigInt::from(3) << (w - 2);
    while r.magnitude().bits() as i64 >= w as i64 || r.abs() > three_quarters {
        if r.is_positive() {
            k += 1;
            r -= &ln2.m;
        } else {
            k -= 1;
            r += &ln2.m;
        }
    }
    let one_w = BigInt::one() << w;
    let mut sum = &one_w + &r;
    let mut term = r.clone();
    let mut j = BigInt::one();
    let mut terms: u64 = 1;
    loop {
        term = shr_floor(&(&term * &r), w);
        j += 1;
        term = div_floor_big(&term, &j);
        if term.is_zero() {
            break;
        }
        sum += &term;
        terms += 1;
    }
    // Rounding errors per term plus truncation tail, then the effect of the
    // error in r itself (|d exp/dr| <= e^0.75 < 3 near the reduced range),
    // and the ln2 error scaled by |k|.
    let err_r = BigInt::from(2) + ln2.err * BigInt::from(k).abs();
    let err = BigInt::from(4 * (terms + 2)) + BigInt::from(3) * err_r;
    let fix = FixErr { m: sum, err };
    // Multiply by 2^k.
    let lo = &fix.m - &fix.err;
    let hi = &fix.m + &fix.err;
    let (lo, hi) = if k >= 0 {
        (lo << k as u32, hi << k as u32)
    } else {
        (shr_floor(&lo, (-k) as u32), shr_ceil(&hi, (-k) as u32))
    };
    DyadicInterval::new(lo, hi, w).round_to(prec_out)
}

/// Enclosure of `exp x`.
pub fn exp(x: &DyadicInterval, prec_out: u32) -> DyadicInterval {
    let a = exp_scalar(&x.lo, x.prec, prec_out);
    let b = exp_scalar(&x.hi, x.prec, prec_out);
    a.hull(&b)
}

fn atan_recip(x: u64, w: u32) -> FixErr {
    // atan(1/x) = sum (-1)^j / ((2j+1) x^(2j+1)), alternating.
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut pw = div_floor_big(&(BigInt::one() << w), &BigInt::from(x));
    let mut sum = pw.clone();
    let mut j = BigInt::one();
    let mut sign_neg = true;
    let mut terms: u64 = 1;
    loop {
        pw = div_floor_big(&pw, &x2);
        j += 2;
        let term = div_floor_big(&pw, &j);
        if term.is_zero() {
            break;
        }
        if sign_neg {
            sum -= &term;
        } else {
            sum += &term;
        }
        sign_neg = !sign_neg;
        terms += 1;
    }
    FixErr {
        m: sum,
        err: BigInt::from(4 * (terms + 2)),
    }
}

/// Enclosure of π (Machin's formula).
pub fn pi(prec: u32) -> DyadicInterval {
    let w = prec + GUARD;
    let a = atan_recip(5, w);
    let b = atan_recip(239, w);
    FixErr {
        m: a.m * 16 - b.m * 4,
        err: a.err * 16 + b.err * 4,
    }
    .interval(w, prec)
}

/// Enclosure of `x^y = exp(y ln x)`; `None` unless `x` is certainly positive.
pub fn pow(x: &DyadicInterval, y: &DyadicInterval, prec_out: u32) -> Option<DyadicInterval> {
    let l = ln(x, prec_out + 32)?;
    Some(exp(&l.mul(y), prec_out))
}

/// Parse a (possibly signed) decimal string into an exact rational.
pub fn decimal_to_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().ok()?;
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    let r = BigRational::new(num, den);
    Some(if neg { -r } else { r })
}
