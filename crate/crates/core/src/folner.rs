//! Følner families in the concrete (semi)groups, with exact defect and
//! temperedness ratios.
//!
//! Each family computes its cardinality in closed form, materializes its
//! element sets below a cap, and computes the temperedness ratio
//! `|U_{k<n} F_k^-1 F_n| / |F_n|` (group form) or its right-translated
//! semigroup form either by a variant-specific closed form or by plain
//! enumeration. Closed form and enumeration are cross-checked in tests.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

use crate::semigroup::{
    self, Element, ExpVec, FqPoly, Permutation, PolyHeisElt, SgError,
};

#[derive(Debug, thiserror::Error)]
pub enum FolnerError {
    #[error("enumeration needs {required} operations, cap is {cap}")]
    EnumerationTooLarge { required: BigUint, cap: u64 },
    #[error("function is not nondecreasing on the scanned range: {0}")]
    NotNondecreasing(String),
    #[error("function does not diverge on the scanned range: {0}")]
    DoesNotDiverge(String),
    #[error("bad family index: {0}")]
    BadIndex(String),
    #[error("family sets are not nested; the union reduction does not apply: {0}")]
    NotNested(String),
    #[error("element tag {0} does not act on this family")]
    WrongTag(&'static str),
    #[error(transparent)]
    Semigroup(#[from] SgError),
    #[error("cannot parse family descriptor `{0}`")]
    Parse(String),
    #[error("arithmetic overflow evaluating {0}")]
    Overflow(String),
}

/// Integer polynomial in the family index `n`, for interval endpoints and
/// Heisenberg box radii.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    pub fn new(coeffs: Vec<i64>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.last() == Some(&0) && coeffs.len() > 1 {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn constant(c: i64) -> Self {
        IntPoly { coeffs: vec![c] }
    }

    pub fn eval(&self, n: u64) -> Result<i64, FolnerError> {
        let mut acc: i128 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = acc
                .checked_mul(n as i128)
                .and_then(|v| v.checked_add(c as i128))
                .ok_or_else(|| FolnerError::Overflow(format!("{self} at n={n}")))?;
        }
        i64::try_from(acc).map_err(|_| FolnerError::Overflow(format!("{self} at n={n}")))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 && self.coeffs.len() > 1 {
                continue;
            }
            let part = match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "n".into(),
                (1, -1) => "-n".into(),
                (1, c) => format!("{c}n"),
                (i, 1) => format!("n^{i}"),
                (i, -1) => format!("-n^{i}"),
                (i, c) => format!("{c}n^{i}"),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut s = parts[0].clone();
        for p in &parts[1..] {
            if p.starts_with('-') {
                s.push_str(p);
            } else {
                s.push('+');
                s.push_str(p);
            }
        }
        write!(f, "{s}")
    }
}

impl std::str::FromStr for IntPoly {
    type Err = FolnerError;

    /// Sums of `c`, `n`, `cn`, `n^k`, `cn^k` with `+`/`-`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || FolnerError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        let mut coeffs: Vec<i64> = Vec::new();
        let mut rest = compact.as_str();
        let mut sign = 1i64;
        if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r;
        }
        loop {
            let split = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = &rest[..split];
            if term.is_empty() {
                return Err(err());
            }
            let (coeff_str, pow) = if let Some((c, p)) = term.split_once("n^") {
                (c, p.parse::<usize>().map_err(|_| err())?)
            } else if let Some(c) = term.strip_suffix('n') {
                (c, 1)
            } else {
                (term, 0)
            };
            let mut coeff = match coeff_str {
                "" => 1,
                "*" => 1,
                c => c.strip_suffix('*').unwrap_or(c).parse::<i64>().map_err(|_| err())?,
            };
            coeff *= sign;
            if coeffs.len() <= pow {
                coeffs.resize(pow + 1, 0);
            }
            coeffs[pow] += coeff;
            if split == rest.len() {
                break;
            }
            sign = if rest.as_bytes()[split] == b'-' { -1 } else { 1 };
            rest = &rest[split + 1..];
        }
        Ok(IntPoly::new(coeffs))
    }
}

/// Exponent cap `f(n)` for multiplicative boxes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GrowthFn {
    /// `n^k`
    PowK(u32),
    /// `n^n`
    SelfPow,
    /// constant
    Const(u64),
}

impl GrowthFn {
    pub fn eval(&self, n: u64) -> BigUint {
        match self {
            GrowthFn::PowK(k) => BigUint::from(n).pow(*k),
            GrowthFn::SelfPow => BigUint::from(n).pow(u32::try_from(n).expect("index too large")),
            GrowthFn::Const(c) => BigUint::from(*c),
        }
    }

    pub fn diverges(&self) -> bool {
        match self {
            GrowthFn::PowK(k) => *k >= 1,
            GrowthFn::SelfPow => true,
            GrowthFn::Const(_) => false,
        }
    }
}

impl fmt::Display for GrowthFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFn::PowK(1) => write!(f, "n"),
            GrowthFn::PowK(k) => write!(f, "n^{k}"),
            GrowthFn::SelfPow => write!(f, "n^n"),
            GrowthFn::Const(c) => write!(f, "{c}"),
        }
    }
}

/// Indexed generator of finite sets in one of the concrete (semi)groups.
#[derive(Clone, Debug, PartialEq)]
pub enum FolnerFamily {
    /// Integer intervals `[a(n), b(n)]` in (Z,+) / (N,+).
    Interval { a: IntPoly, b: IntPoly },
    /// `{p_1^{c_1} ... p_n^{c_n} : 0 <= c_i <= (i+1)^{2n}}` in (N,·).
    MultBoxPaper,
    /// `{p_1^{c_1} ... p_n^{c_n} : 0 <= c_i <= f(n)}` in (N,·).
    MultBoxF { f: GrowthFn },
    /// `{p_1^{c_1} ... p_n^{c_n} : 0 <= c_i <= (i+1)^{(1+eps) n}}`.
    MultBoxEps { eps: BigRational },
    /// `{(a,b,c) : |a|,|b| <= n, |c| <= n^2}` in the Heisenberg group.
    HeisBox,
    /// `{(a,b,c) : |a|,|b| <= p(n), |c| <= q(n)}`.
    HeisBoxPoly { p: IntPoly, q: IntPoly },
    /// Symmetric groups `S_n` inside the finite permutations of N.
    SymChain,
    /// Heisenberg triples over F_q[x] with `deg f, deg g <= n`,
    /// `deg h <= 2n`.
    PolyHeisChain { q: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioMethod {
    ClosedForm,
    Enumeration,
}

/// Group-form vs right-translated semigroup form of the tempered ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Group,
    Semigroup,
}

impl FolnerFamily {
    /// Exponent bound of prime `p_i` (1-based) in `F_n`, for box variants.
    fn mult_bound(&self, i: u64, n: u64) -> Option<BigUint> {
        match self {
            FolnerFamily::MultBoxPaper => {
                Some(BigUint::from(i + 1).pow(u32::try_from(2 * n).ok()?))
            }
            FolnerFamily::MultBoxF { f } => Some(f.eval(n)),
            FolnerFamily::MultBoxEps { eps } => {
                // floor((i+1)^{(1+eps) n}) computed exactly as an integer
                // root: with eps = u/v, this is floor(((i+1)^{(u+v) n})^{1/v}).
                let u = eps.numer().to_u64()?;
                let v = eps.denom().to_u64()?;
                let e = u32::try_from((u + v) * n).ok()?;
                let base = BigUint::from(i + 1).pow(e);
                Some(base.nth_root(u32::try_from(v).ok()?))
            }
            _ => None,
        }
    }

    pub fn is_mult_box(&self) -> bool {
        matches!(
            self,
            FolnerFamily::MultBoxPaper | FolnerFamily::MultBoxF { .. } | FolnerFamily::MultBoxEps { .. }
        )
    }

    /// Heisenberg box radii `(p, q)` at index n, for the two box variants.
    fn heis_radii(&self, n: u64) -> Result<Option<(i64, i64)>, FolnerError> {
        match self {
            FolnerFamily::HeisBox => {
                let ni = i64::try_from(n)
                    .map_err(|_| FolnerError::Overflow(format!("heisbox at n={n}")))?;
                Ok(Some((
                    ni,
                    ni.checked_mul(ni)
                        .ok_or_else(|| FolnerError::Overflow(format!("heisbox at n={n}")))?,
                )))
            }
            FolnerFamily::HeisBoxPoly { p, q } => {
                let pv = p.eval(n)?;
                let qv = q.eval(n)?;
                if pv < 0 || qv < 0 {
                    return Err(FolnerError::BadIndex(format!(
                        "negative box radius at n={n}"
                    )));
                }
                Ok(Some((pv, qv)))
            }
            _ => Ok(None),
        }
    }

    /// `|F_n|` in closed form.
    pub fn cardinality(&self, n: u64) -> Result<BigUint, FolnerError> {
        assert!(n >= 1);
        match self {
            FolnerFamily::Interval { a, b } => {
                let (lo, hi) = (a.eval(n)?, b.eval(n)?);
                if lo > hi {
                    return Err(FolnerError::BadIndex(format!(
                        "empty interval [{lo}, {hi}] at n={n}"
                    )));
                }
                Ok(BigUint::from((hi - lo + 1) as u64))
            }
            FolnerFamily::MultBoxPaper | FolnerFamily::MultBoxF { .. } | FolnerFamily::MultBoxEps { .. } => {
                let mut card = BigUint::one();
                for i in 1..=n {
                    card *= self.mult_bound(i, n).ok_or_else(|| {
                        FolnerError::Overflow(format!("exponent bound at n={n}"))
                    })? + BigUint::one();
                }
                Ok(card)
            }
            FolnerFamily::HeisBox | FolnerFamily::HeisBoxPoly { .. } => {
                let (p, q) = self.heis_radii(n)?.expect("heis variant");
                let side = BigUint::from(2 * p as u64 + 1);
                Ok(&side * &side * BigUint::from(2 * q as u64 + 1))
            }
            FolnerFamily::SymChain => {
                let mut f = BigUint::one();
                for k in 2..=n {
                    f *= BigUint::from(k);
                }
                Ok(f)
            }
            FolnerFamily::PolyHeisChain { q } => {
                let e = u32::try_from(4 * n + 3)
                    .map_err(|_| FolnerError::Overflow(format!("polyheis at n={n}")))?;
                Ok(BigUint::from(*q).pow(e))
            }
        }
    }

    /// Materialize `F_n`; refuses when the cardinality exceeds `cap`.
    pub fn elements(&self, n: u64, cap: u64) -> Result<Vec<Element>, FolnerError> {
        let card = self.cardinality(n)?;
        if card > BigUint::from(cap) {
            return Err(FolnerError::EnumerationTooLarge {
                required: card,
                cap,
            });
        }
        match self {
            FolnerFamily::Interval { a, b } => {
                let (lo, hi) = (a.eval(n)?, b.eval(n)?);
                Ok((lo..=hi).map(|k| Element::IntAdd(BigInt::from(k))).collect())
            }
            FolnerFamily::MultBoxPaper | FolnerFamily::MultBoxF { .. } | FolnerFamily::MultBoxEps { .. } => {
                let bounds: Vec<i64> = (1..=n)
                    .map(|i| {
                        self.mult_bound(i, n)
                            .and_then(|b| b.to_i64())
                            .ok_or_else(|| FolnerError::Overflow("exponent bound".into()))
                    })
                    .collect::<Result<_, _>>()?;
                let mut out = Vec::new();
                let mut current = vec![0i64; n as usize];
                loop {
                    out.push(Element::NatMul(ExpVec::new(
                        current
                            .iter()
                            .enumerate()
                            .map(|(i, &e)| (i as u16, e))
                            .collect(),
                    )));
                    let mut pos = 0usize;
                    loop {
                        if pos == current.len() {
                            return Ok(out);
                        }
                        if current[pos] < bounds[pos] {
                            current[pos] += 1;
                            break;
                        }
                        current[pos] = 0;
                        pos += 1;
                    }
                }
            }
            FolnerFamily::HeisBox | FolnerFamily::HeisBoxPoly { .. } => {
                let (p, q) = self.heis_radii(n)?.expect("heis variant");
                let mut out = Vec::with_capacity(card.to_usize().unwrap_or(0));
                for a in -p..=p {
                    for b in -p..=p {
                        for c in -q..=q {
                            out.push(Element::heis(a, b, c));
                        }
                    }
                }
                Ok(out)
            }
            FolnerFamily::SymChain => {
                let k = u32::try_from(n).map_err(|_| FolnerError::Overflow("sym index".into()))?;
                let mut out = Vec::new();
                let mut perm: Vec<u32> = (1..=k).collect();
                permutations(&mut perm, 0, &mut out);
                Ok(out)
            }
            FolnerFamily::PolyHeisChain { q } => {
                let deg_fg = n as usize;
                let deg_h = 2 * n as usize;
                let fs = all_fq_polys(deg_fg, *q);
                let hs = all_fq_polys(deg_h, *q);
                let mut out = Vec::new();
                for f in &fs {
                    for g in &fs {
                        for h in &hs {
                            out.push(Element::PolyHeis(PolyHeisElt {
                                q: *q,
                                f: f.clone(),
                                g: g.clone(),
                                h: h.clone(),
                            }));
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Exact Følner defect `|F_n ∩ g F_n| / |F_n|`.
    pub fn defect(&self, g: &Element, n: u64) -> Result<BigRational, FolnerError> {
        let card = self.cardinality(n)?;
        let total = BigRational::from_integer(BigInt::from(card.clone()));
        let hit = match (self, g) {
            (FolnerFamily::Interval { a, b }, Element::IntAdd(k)) => {
                let (lo, hi) = (a.eval(n)?, b.eval(n)?);
                let len = BigInt::from(hi - lo + 1);
                let overlap = (&len - k.abs()).max(BigInt::zero());
                BigRational::from_integer(overlap)
            }
            (fam, Element::NatMul(r)) if fam.is_mult_box() => {
                if let Some(max_idx) = r.max_prime_index() {
                    if max_idx as u64 >= n {
                        return Ok(BigRational::zero());
                    }
                }
                let mut count = BigInt::one();
                for i in 1..=n {
                    let bound = BigInt::from(self.mult_bound(i, n).unwrap());
                    let ri = BigInt::from(r.exponent((i - 1) as u16));
                    let c = (&bound - &ri + BigInt::one()).max(BigInt::zero());
                    count *= c;
                }
                BigRational::from_integer(count)
            }
            (fam, Element::Heisenberg(x, y, z))
                if matches!(fam, FolnerFamily::HeisBox | FolnerFamily::HeisBoxPoly { .. }) =>
            {
                let (p, q) = self.heis_radii(n)?.expect("heis variant");
                BigRational::from_integer(heis_translate_overlap(p, q, x, y, z))
            }
            (FolnerFamily::SymChain, Element::FinPerm(s)) => {
                let inside = s.max_moved().map_or(true, |m| m as u64 <= n);
                if inside {
                    total.clone()
                } else {
                    BigRational::zero()
                }
            }
            (FolnerFamily::PolyHeisChain { q }, Element::PolyHeis(e)) => {
                // F_n is a subgroup; a coset either coincides or is disjoint.
                let inside = e.q == *q
                    && e.f.degree() <= n as i64
                    && e.g.degree() <= n as i64
                    && e.h.degree() <= 2 * n as i64;
                if inside {
                    total.clone()
                } else {
                    BigRational::zero()
                }
            }
            (_, g) => return Err(FolnerError::WrongTag(g.tag())),
        };
        Ok(hit / total)
    }

    /// Oracle route for the defect: materialize and intersect.
    pub fn defect_enumerated(
        &self,
        g: &Element,
        n: u64,
        cap: u64,
    ) -> Result<BigRational, FolnerError> {
        let elems = self.elements(n, cap)?;
        let set: BTreeSet<Element> = elems.iter().cloned().collect();
        let mut hits = 0u64;
        for e in &elems {
            if set.contains(&semigroup::mul(g, e)?) {
                hits += 1;
            }
        }
        Ok(BigRational::new(
            BigInt::from(hits),
            BigInt::from(elems.len() as u64),
        ))
    }

    fn check_nested_up_to(&self, n: u64) -> Result<(), FolnerError> {
        match self {
            FolnerFamily::Interval { .. } => Ok(()), // handled by exact union
            FolnerFamily::MultBoxPaper | FolnerFamily::MultBoxEps { .. } => Ok(()),
            FolnerFamily::MultBoxF { f } => {
                for k in 1..n {
                    if f.eval(k) > f.eval(k + 1) {
                        return Err(FolnerError::NotNondecreasing(format!("f at n={k}")));
                    }
                }
                Ok(())
            }
            FolnerFamily::HeisBox | FolnerFamily::SymChain | FolnerFamily::PolyHeisChain { .. } => {
                Ok(())
            }
            FolnerFamily::HeisBoxPoly { .. } => {
                for k in 1..n {
                    let (pa, qa) = self.heis_radii(k)?.unwrap();
                    let (pb, qb) = self.heis_radii(k + 1)?.unwrap();
                    if pa > pb || qa > qb {
                        return Err(FolnerError::NotNested(format!(
                            "box radii shrink from n={k} to n={}",
                            k + 1
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Tempered ratio at index `n >= 2`.
    ///
    /// Group mode: `|U_{k<n} F_k^-1 F_n| / |F_n|`, computed in the group of
    /// quotients for (N,·) boxes. Semigroup mode: the same with `F_n g`, for
    /// the supplied `g` (identity when omitted); for group tags the translate
    /// cancels and the two modes agree.
    pub fn tempered_ratio(
        &self,
        n: u64,
        mode: Mode,
        g: Option<&Element>,
        cap: u64,
    ) -> Result<(BigRational, RatioMethod), FolnerError> {
        if n < 2 {
            return Err(FolnerError::BadIndex("tempered ratio needs n >= 2".into()));
        }
        match self {
            FolnerFamily::Interval { a, b } => {
                // Union of [a_n - b_k, b_n - a_k] over k < n, merged exactly;
                // no nesting assumption needed.
                let (an, bn) = (a.eval(n)?, b.eval(n)?);
                let mut ivs: Vec<(i64, i64)> = Vec::new();
                for k in 1..n {
                    let (ak, bk) = (a.eval(k)?, b.eval(k)?);
                    if ak > bk {
                        return Err(FolnerError::BadIndex(format!("empty F_{k}")));
                    }
                    ivs.push((an - bk, bn - ak));
                }
                ivs.sort_unstable();
                let mut covered: i128 = 0;
                let mut cur: Option<(i64, i64)> = None;
                for (lo, hi) in ivs {
                    match cur {
                        Some((clo, chi)) if lo as i128 <= chi as i128 + 1 => {
                            cur = Some((clo, chi.max(hi)));
                        }
                        Some((clo, chi)) => {
                            covered += chi as i128 - clo as i128 + 1;
                            cur = Some((lo, hi));
                        }
                        None => cur = Some((lo, hi)),
                    }
                }
                if let Some((clo, chi)) = cur {
                    covered += chi as i128 - clo as i128 + 1;
                }
                let num = BigInt::from(covered);
                let den = BigInt::from(bn - an + 1);
                Ok((BigRational::new(num, den), RatioMethod::ClosedForm))
            }
            FolnerFamily::MultBoxPaper
            | FolnerFamily::MultBoxF { .. }
            | FolnerFamily::MultBoxEps { .. } => {
                self.check_nested_up_to(n)?;
                let r = match (mode, g) {
                    (Mode::Semigroup, Some(Element::NatMul(r))) => r.clone(),
                    (Mode::Semigroup, Some(other)) => {
                        return Err(FolnerError::WrongTag(other.tag()))
                    }
                    _ => ExpVec::one(),
                };
                // Nested boxes: the union over k < n collapses to k = n-1.
                // Per prime p_i (i < n) the reachable exponents of
                // F_{n-1}^-1 (F_n r) within the semigroup form the range
                // [max(0, r_i - B_i(n-1)), B_i(n) + r_i]. In group mode the
                // range is [-B_i(n-1), B_i(n)].
                let mut count = BigInt::one();
                for i in 1..=n {
                    let bn = BigInt::from(self.mult_bound(i, n).unwrap());
                    let bprev = if i <= n - 1 {
                        BigInt::from(self.mult_bound(i, n - 1).unwrap())
                    } else {
                        BigInt::zero()
                    };
                    let factor = match mode {
                        Mode::Group => &bn + &bprev + BigInt::one(),
                        Mode::Semigroup => {
                            let ri = BigInt::from(r.exponent((i - 1) as u16));
                            &bn + ri.min(bprev) + BigInt::one()
                        }
                    };
                    count *= factor;
                }
                // Exponents of r on primes beyond p_n pin single values and
                // contribute factor 1.
                let den = BigInt::from(self.cardinality(n)?);
                Ok((BigRational::new(count, den), RatioMethod::ClosedForm))
            }
            FolnerFamily::HeisBox | FolnerFamily::HeisBoxPoly { .. } => {
                self.check_nested_up_to(n)?;
                let (p1, q1) = self.heis_radii(n - 1)?.unwrap();
                let (p2, q2) = self.heis_radii(n)?.unwrap();
                let pairs = self.cardinality(n - 1)? * self.cardinality(n)?;
                if pairs > BigUint::from(cap) {
                    return Err(FolnerError::EnumerationTooLarge {
                        required: pairs,
                        cap,
                    });
                }
                let count = heis_quotient_count_boxes(p1, q1, p2, q2);
                let den = BigInt::from(self.cardinality(n)?);
                Ok((
                    BigRational::new(BigInt::from(count), den),
                    RatioMethod::Enumeration,
                ))
            }
            FolnerFamily::SymChain | FolnerFamily::PolyHeisChain { .. } => {
                // Increasing subgroups: F_{n-1}^-1 F_n = F_n exactly.
                Ok((BigRational::one(), RatioMethod::ClosedForm))
            }
        }
    }

    /// Enumeration oracle for the tempered ratio: materializes every
    /// `F_k` with `k < n` and takes the true union of quotient sets.
    pub fn tempered_ratio_enumerated(
        &self,
        n: u64,
        mode: Mode,
        g: Option<&Element>,
        cap: u64,
    ) -> Result<BigRational, FolnerError> {
        if n < 2 {
            return Err(FolnerError::BadIndex("tempered ratio needs n >= 2".into()));
        }
        let mut pairs = BigUint::zero();
        let fn_card = self.cardinality(n)?;
        for k in 1..n {
            pairs += self.cardinality(k)? * &fn_card;
        }
        if pairs > BigUint::from(cap) {
            return Err(FolnerError::EnumerationTooLarge {
                required: pairs,
                cap,
            });
        }
        let f_n = self.elements(n, cap)?;
        // (N,·) boxes: group mode works in the group of quotients.
        let lift = |v: Vec<Element>| -> Vec<Element> {
            if self.is_mult_box() && mode == Mode::Group {
                v.iter().map(|e| e.to_qpos().unwrap()).collect()
            } else {
                v
            }
        };
        let f_n = lift(f_n);
        let mut union: BTreeSet<Element> = BTreeSet::new();
        for k in 1..n {
            let f_k = lift(self.elements(k, cap)?);
            let part = match (mode, g) {
                (Mode::Semigroup, Some(t)) => {
                    semigroup::right_translate_quotient(&f_k, &f_n, t)?
                }
                _ => semigroup::left_quotient_set(&f_k, &f_n)?,
            };
            union.extend(part);
        }
        Ok(BigRational::new(
            BigInt::from(union.len() as u64),
            BigInt::from(fn_card),
        ))
    }
}

fn permutations(arr: &mut Vec<u32>, k: usize, out: &mut Vec<Element>) {
    if k == arr.len() {
        let map = arr
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as u32 + 1, v))
            .collect();
        out.push(Element::FinPerm(
            Permutation::from_map(map).expect("generated permutations are bijections"),
        ));
        return;
    }
    for i in k..arr.len() {
        arr.swap(k, i);
        permutations(arr, k + 1, out);
        arr.swap(k, i);
    }
}

fn all_fq_polys(max_deg: usize, q: u32) -> Vec<FqPoly> {
    let mut out = Vec::new();
    let mut coeffs = vec![0u32; max_deg + 1];
    loop {
        out.push(FqPoly::new(coeffs.clone(), q));
        let mut pos = 0;
        loop {
            if pos == coeffs.len() {
                return out;
            }
            coeffs[pos] += 1;
            if coeffs[pos] < q {
                break;
            }
            coeffs[pos] = 0;
            pos += 1;
        }
    }
}

/// `|F ∩ gF|` for the Heisenberg box with radii (p, q) and g = (x, y, z):
/// the overlap factorizes over the first coordinate and reduces to a sum
/// over the second.
fn heis_translate_overlap(p: i64, q: i64, x: &BigInt, y: &BigInt, z: &BigInt) -> BigInt {
    let pb = BigInt::from(p);
    let a_lo = (-&pb).max(x - &pb);
    let a_hi = pb.clone().min(x + &pb);
    if a_lo > a_hi {
        return BigInt::zero();
    }
    let a_count = &a_hi - &a_lo + 1;
    let b_lo = (-&pb).max(y - &pb);
    let b_hi = pb.clone().min(y + &pb);
    let mut sum = BigInt::zero();
    let full = BigInt::from(2 * q + 1);
    let mut b = b_lo.clone();
    while b <= b_hi {
        let shift = (z + x * (&b - y)).abs();
        let c = (&full - shift).max(BigInt::zero());
        sum += c;
        b += 1;
    }
    a_count * sum
}

/// Exact `|F_{n-1}^-1 F_n|` for Heisenberg boxes, by pairwise products
/// into a dense membership array.
fn heis_quotient_count_boxes(p1: i64, q1: i64, p2: i64, q2: i64) -> u64 {
    // u^-1 with u in F_{n-1} ranges over |x|,|y| <= p1 and
    // z in [xy - q1, xy + q1].
    let px = p1 + p2;
    // |z + x b + c| <= (p1^2 + q1) + p1 p2 + q2 over the inverse box.
    let tmax = p1 * p1 + q1 + p1 * p2 + q2;
    let side = (2 * px + 1) as usize;
    let tside = (2 * tmax + 1) as usize;
    let mut bits = vec![false; side * side * tside];
    let mut count = 0u64;
    for x in -p1..=p1 {
        for y in -p1..=p1 {
            let base = x * y;
            for z in (base - q1)..=(base + q1) {
                for a in -p2..=p2 {
                    let xi = (x + a + px) as usize;
                    for b in -p2..=p2 {
                        let yi = (y + b + px) as usize;
                        let t0 = z + x * b;
                        let row = (xi * side + yi) * tside;
                        for c in -q2..=q2 {
                            let ti = (t0 + c + tmax) as usize;
                            let slot = row + ti;
                            if !bits[slot] {
                                bits[slot] = true;
                                count += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    count
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioPoint {
    pub n: u64,
    pub ratio: String,
    pub approx: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TemperednessReport {
    pub family: String,
    pub mode: Mode,
    pub n_max: u64,
    pub c_candidate: f64,
    pub ratios: Vec<RatioPoint>,
    pub sup: f64,
    pub first_violation: Option<u64>,
    pub method: RatioMethod,
    /// Known constant the variant's ratios approach or stay under, when
    /// one exists.
    pub closed_form_bound: Option<f64>,
}

/// Scan ratios for `2 <= n <= n_max` against a candidate constant.
///
/// In semigroup mode the ratio at each index is the max over the supplied
/// finite `g`-set (the quantifier over all of G is infinite; the report
/// says exactly which translates were tried).
pub fn temperedness_scan(
    family: &FolnerFamily,
    n_max: u64,
    c_candidate: f64,
    mode: Mode,
    g_set: &[Element],
    cap: u64,
) -> Result<TemperednessReport, FolnerError> {
    let mut ratios = Vec::new();
    let mut sup = 0.0f64;
    let mut first_violation = None;
    let mut method = RatioMethod::ClosedForm;
    for n in 2..=n_max {
        let (ratio, m) = match (mode, g_set.is_empty()) {
            (Mode::Semigroup, false) => {
                let mut best: Option<(BigRational, RatioMethod)> = None;
                for g in g_set {
                    let (r, m) = family.tempered_ratio(n, mode, Some(g), cap)?;
                    best = Some(match best {
                        Some((br, bm)) if br >= r => (br, bm),
                        _ => (r, m),
                    });
                }
                best.unwrap()
            }
            _ => family.tempered_ratio(n, mode, None, cap)?,
        };
        method = m;
        let approx = ratio_to_f64(&ratio);
        sup = sup.max(approx);
        if first_violation.is_none() && approx > c_candidate {
            first_violation = Some(n);
        }
        ratios.push(RatioPoint {
            n,
            ratio: format!("{}/{}", ratio.numer(), ratio.denom()),
            approx,
        });
    }
    Ok(TemperednessReport {
        family: family.to_string(),
        mode,
        n_max,
        c_candidate,
        ratios,
        sup,
        first_violation,
        method,
        closed_form_bound: family_bound(family),
    })
}

fn family_bound(family: &FolnerFamily) -> Option<f64> {
    match family {
        // prod_{i>=1} (1 + 1/(i+1)^2)
        FolnerFamily::MultBoxPaper => Some(1.838_038_7),
        FolnerFamily::SymChain | FolnerFamily::PolyHeisChain { .. } => Some(1.0),
        _ => None,
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::INFINITY)
}

#[derive(Clone, Debug, Serialize)]
pub struct Criterion53Report {
    pub f: String,
    pub n_max: u64,
    /// `n f(n) / f(n+1)` for `n = 1..=n_max`.
    pub values: Vec<RatioPoint>,
    pub max: f64,
    pub max_at: u64,
    /// Heuristic trend: does the tail still grow?
    pub growing_tail: bool,
}

/// The boundedness criterion sequence `n f(n) / f(n+1)`.
pub fn criterion_5_3(f: &GrowthFn, n_max: u64) -> Result<Criterion53Report, FolnerError> {
    for n in 1..n_max {
        if f.eval(n) > f.eval(n + 1) {
            return Err(FolnerError::NotNondecreasing(format!("{f} at n={n}")));
        }
    }
    if !f.diverges() {
        return Err(FolnerError::DoesNotDiverge(f.to_string()));
    }
    let mut values = Vec::new();
    let mut max = 0.0f64;
    let mut max_at = 1;
    for n in 1..=n_max {
        let r = BigRational::new(
            BigInt::from(n) * BigInt::from(f.eval(n)),
            BigInt::from(f.eval(n + 1)),
        );
        let approx = ratio_to_f64(&r);
        if approx > max {
            max = approx;
            max_at = n;
        }
        values.push(RatioPoint {
            n,
            ratio: format!("{}/{}", r.numer(), r.denom()),
            approx,
        });
    }
    // Doubling-window growth test: a bounded sequence levels off between
    // n_max/2 and n_max, an unbounded power keeps climbing.
    let growing_tail = values.len() >= 4 && {
        let half = values[values.len() / 2 - 1].approx;
        let last = values.last().unwrap().approx;
        last > 1.5 * half
    };
    Ok(Criterion53Report {
        f: f.to_string(),
        n_max,
        values,
        max,
        max_at,
        growing_tail,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HeisQuotientReport {
    pub n: u64,
    /// Exact `|F_{n-1}^-1 F_n|` by enumeration.
    pub count: u64,
    /// `|F_n| = (2n+1)^2 (2n^2+1)`.
    pub family_cardinality: u64,
    /// Upper bound `(2(2n-1)+1)^2 (4(n-1)^2 + 2n(n-1) + 2n^2 + 1)` on the
    /// count.
    pub bound_count: u64,
    pub ratio: f64,
    pub bound_ratio: f64,
    pub within_bound: bool,
}

/// Exact Heisenberg quotient-set count at index `n >= 2`, with the closed
/// bound it must stay under.
pub fn heisenberg_quotient_count(n: u64, cap: u64) -> Result<HeisQuotientReport, FolnerError> {
    if n < 2 {
        return Err(FolnerError::BadIndex(
            "heisenberg quotient count needs n >= 2".into(),
        ));
    }
    let fam = FolnerFamily::HeisBox;
    let pairs = fam.cardinality(n - 1)? * fam.cardinality(n)?;
    if pairs > BigUint::from(cap) {
        return Err(FolnerError::EnumerationTooLarge {
            required: pairs,
            cap,
        });
    }
    let ni = n as i64;
    let count = heis_quotient_count_boxes(ni - 1, (ni - 1) * (ni - 1), ni, ni * ni);
    let family_cardinality = ((2 * n + 1) * (2 * n + 1) * (2 * n * n + 1)) as u64;
    let bound_count = {
        let s = 2 * (2 * ni - 1) + 1;
        (s * s * (4 * (ni - 1) * (ni - 1) + 2 * ni * (ni - 1) + 2 * ni * ni + 1)) as u64
    };
    Ok(HeisQuotientReport {
        n,
        count,
        family_cardinality,
        bound_count,
        ratio: count as f64 / family_cardinality as f64,
        bound_ratio: bound_count as f64 / family_cardinality as f64,
        within_bound: count <= bound_count,
    })
}

impl fmt::Display for FolnerFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FolnerFamily::Interval { a, b } => write!(f, "interval:a={a},b={b}"),
            FolnerFamily::MultBoxPaper => write!(f, "multbox:paper"),
            FolnerFamily::MultBoxF { f: g } => write!(f, "multbox:f={g}"),
            FolnerFamily::MultBoxEps { eps } => {
                write!(f, "multbox:eps={}/{}", eps.numer(), eps.denom())
            }
            FolnerFamily::HeisBox => write!(f, "heisbox"),
            FolnerFamily::HeisBoxPoly { p, q } => write!(f, "heisbox:p={p},q={q}"),
            FolnerFamily::SymChain => write!(f, "chain:sym"),
            FolnerFamily::PolyHeisChain { q } => write!(f, "chain:polyheis:q={q}"),
        }
    }
}

impl std::str::FromStr for FolnerFamily {
    type Err = FolnerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || FolnerError::Parse(s.to_string());
        if s == "heisbox" {
            return Ok(FolnerFamily::HeisBox);
        }
        if s == "chain:sym" {
            return Ok(FolnerFamily::SymChain);
        }
        if let Some(rest) = s.strip_prefix("chain:polyheis:") {
            let q = rest
                .strip_prefix("q=")
                .and_then(|v| v.parse::<u32>().ok())
                .ok_or_else(err)?;
            if q < 2 || !is_prime_u32(q) {
                return Err(err());
            }
            return Ok(FolnerFamily::PolyHeisChain { q });
        }
        if let Some(rest) = s.strip_prefix("interval:") {
            let mut a = None;
            let mut b = None;
            for part in rest.split(',') {
                if let Some(v) = part.strip_prefix("a=") {
                    a = Some(v.parse()?);
                } else if let Some(v) = part.strip_prefix("b=") {
                    b = Some(v.parse()?);
                } else {
                    return Err(err());
                }
            }
            return Ok(FolnerFamily::Interval {
                a: a.ok_or_else(err)?,
                b: b.ok_or_else(err)?,
            });
        }
        if let Some(rest) = s.strip_prefix("multbox:") {
            if rest == "paper" {
                return Ok(FolnerFamily::MultBoxPaper);
            }
            if let Some(v) = rest.strip_prefix("f=") {
                let f = if v == "n^n" {
                    GrowthFn::SelfPow
                } else if v == "n" {
                    GrowthFn::PowK(1)
                } else if let Some(k) = v.strip_prefix("n^") {
                    GrowthFn::PowK(k.parse().map_err(|_| err())?)
                } else {
                    GrowthFn::Const(v.parse().map_err(|_| err())?)
                };
                return Ok(FolnerFamily::MultBoxF { f });
            }
            if let Some(v) = rest.strip_prefix("eps=") {
                let eps = match v.split_once('/') {
                    Some((num, den)) => BigRational::new(
                        num.parse().map_err(|_| err())?,
                        den.parse().map_err(|_| err())?,
                    ),
                    None => BigRational::from_integer(v.parse().map_err(|_| err())?),
                };
                if eps.is_negative() {
                    return Err(err());
                }
                return Ok(FolnerFamily::MultBoxEps { eps });
            }
            return Err(err());
        }
        if let Some(rest) = s.strip_prefix("heisbox:") {
            let mut p = None;
            let mut q = None;
            for part in rest.split(',') {
                if let Some(v) = part.strip_prefix("p=") {
                    p = Some(v.parse()?);
                } else if let Some(v) = part.strip_prefix("q=") {
                    q = Some(v.parse()?);
                } else {
                    return Err(err());
                }
            }
            return Ok(FolnerFamily::HeisBoxPoly {
                p: p.ok_or_else(err)?,
                q: q.ok_or_else(err)?,
            });
        }
        Err(err())
    }
}

fn is_prime_u32(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval_1_to_n() -> FolnerFamily {
        FolnerFamily::Interval {
            a: IntPoly::constant(1),
            b: "n".parse().unwrap(),
        }
    }

    #[test]
    fn int_poly_parse_and_eval() {
        let p: IntPoly = "n^2+n".parse().unwrap();
        assert_eq!(p.eval(10).unwrap(), 110);
        let q: IntPoly = "2n^2-3n+5".parse().unwrap();
        assert_eq!(q.eval(4).unwrap(), 25);
        assert_eq!("1".parse::<IntPoly>().unwrap().eval(99).unwrap(), 1);
        assert!("n^".parse::<IntPoly>().is_err());
    }

    #[test]
    fn cardinalities_match_enumeration() {
        let cap = 2_000_000;
        let families = vec![
            interval_1_to_n(),
            FolnerFamily::MultBoxPaper,
            FolnerFamily::MultBoxF {
                f: GrowthFn::PowK(2),
            },
            FolnerFamily::MultBoxEps {
                eps: BigRational::new(BigInt::one(), BigInt::from(2)),
            },
            FolnerFamily::HeisBox,
            FolnerFamily::SymChain,
            FolnerFamily::PolyHeisChain { q: 2 },
        ];
        for fam in families {
            for n in 1..=3u64 {
                let card = fam.cardinality(n).unwrap();
                if card > BigUint::from(cap) {
                    continue;
                }
                let elems = fam.elements(n, cap).unwrap();
                assert_eq!(
                    BigUint::from(elems.len() as u64),
                    card,
                    "cardinality mismatch for {fam} at n={n}"
                );
                let distinct: BTreeSet<_> = elems.iter().collect();
                assert_eq!(distinct.len(), elems.len(), "duplicates in {fam} at n={n}");
            }
        }
    }

    #[test]
    fn heisbox_cardinality_formula() {
        for n in 1..=6u64 {
            assert_eq!(
                FolnerFamily::HeisBox.cardinality(n).unwrap(),
                BigUint::from((2 * n + 1) * (2 * n + 1) * (2 * n * n + 1))
            );
        }
    }

    #[test]
    fn nesting_of_materialized_families() {
        let cap = 5_000_000;
        let families = vec![
            interval_1_to_n(),
            FolnerFamily::MultBoxPaper,
            FolnerFamily::MultBoxF {
                f: GrowthFn::PowK(2),
            },
            FolnerFamily::HeisBox,
            FolnerFamily::SymChain,
            FolnerFamily::PolyHeisChain { q: 2 },
        ];
        for fam in families {
            for n in 1..=2u64 {
                if fam.cardinality(n + 1).unwrap() > BigUint::from(cap) {
                    continue;
                }
                let small: BTreeSet<Element> =
                    fam.elements(n, cap).unwrap().into_iter().collect();
                let large: BTreeSet<Element> =
                    fam.elements(n + 1, cap).unwrap().into_iter().collect();
                assert!(
                    small.is_subset(&large),
                    "F_{n} not inside F_{} for {fam}",
                    n + 1
                );
            }
        }
    }

    #[test]
    fn defect_examples() {
        // Interval {1..100}, g = +1 -> 99/100.
        let interval = interval_1_to_n();
        let d = interval
            .defect(&Element::IntAdd(BigInt::one()), 100)
            .unwrap();
        assert_eq!(d, BigRational::new(BigInt::from(99), BigInt::from(100)));

        // Identity defect is 1 for every variant.
        let families = vec![
            interval_1_to_n(),
            FolnerFamily::MultBoxPaper,
            FolnerFamily::HeisBox,
            FolnerFamily::SymChain,
            FolnerFamily::PolyHeisChain { q: 2 },
        ];
        for fam in families {
            let any = fam.elements(1, 10_000).unwrap();
            let e = any[0].identity_like();
            assert_eq!(fam.defect(&e, 2).unwrap(), BigRational::one(), "{fam}");
        }

        // MultBoxPaper n=2, g=2 -> 16/17.
        let d = FolnerFamily::MultBoxPaper
            .defect(&Element::nat_from_u64(2).unwrap(), 2)
            .unwrap();
        assert_eq!(d, BigRational::new(BigInt::from(16), BigInt::from(17)));
    }

    #[test]
    fn defect_closed_form_matches_enumeration() {
        let cap = 300_000;
        let cases: Vec<(FolnerFamily, Vec<Element>, u64)> = vec![
            (
                interval_1_to_n(),
                vec![Element::IntAdd(BigInt::from(3)), Element::IntAdd(BigInt::from(-7))],
                50,
            ),
            (
                FolnerFamily::MultBoxPaper,
                vec![
                    Element::nat_from_u64(6).unwrap(),
                    Element::nat_from_u64(8).unwrap(),
                    Element::nat_from_u64(5).unwrap(),
                ],
                2,
            ),
            (
                FolnerFamily::HeisBox,
                vec![
                    Element::heis(1, 2, -3),
                    Element::heis(-2, 0, 5),
                    Element::heis(0, 0, 1),
                    Element::heis(3, 3, 9),
                ],
                3,
            ),
            (
                FolnerFamily::SymChain,
                vec![
                    Element::FinPerm(Permutation::from_cycle(&[1, 2]).unwrap()),
                    Element::FinPerm(Permutation::from_cycle(&[4, 5]).unwrap()),
                ],
                4,
            ),
        ];
        for (fam, gs, n) in cases {
            for g in gs {
                let closed = fam.defect(&g, n).unwrap();
                let enumerated = fam.defect_enumerated(&g, n, cap).unwrap();
                assert_eq!(closed, enumerated, "defect mismatch for {fam} with {g}");
            }
        }
    }

    #[test]
    fn defect_approaches_one() {
        let fam = FolnerFamily::HeisBox;
        let g = Element::heis(1, -1, 2);
        let mut prev = BigRational::zero();
        for n in 3..=12 {
            let d = fam.defect(&g, n).unwrap();
            assert!(d >= prev, "defect not monotone at n={n}");
            prev = d;
        }
        assert!(ratio_to_f64(&prev) > 0.8);
    }

    #[test]
    fn interval_tempered_ratio_example() {
        // {1..n}: |U F_k^-1 F_n| = 2n-2, ratio 18/10 at n=10.
        let fam = interval_1_to_n();
        let (r, m) = fam.tempered_ratio(10, Mode::Group, None, 1 << 20).unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(18), BigInt::from(10)));
        assert_eq!(m, RatioMethod::ClosedForm);
    }

    #[test]
    fn multbox_paper_ratio_examples() {
        // n=2: 1 + 4/17 = 21/17.
        let fam = FolnerFamily::MultBoxPaper;
        let (r2, _) = fam.tempered_ratio(2, Mode::Group, None, 1 << 30).unwrap();
        assert_eq!(r2, BigRational::new(BigInt::from(21), BigInt::from(17)));
        // n=3: (1 + 16/65)(1 + 81/730) = 65691/47450.
        let (r3, _) = fam.tempered_ratio(3, Mode::Group, None, 1 << 30).unwrap();
        assert_eq!(
            r3,
            BigRational::new(BigInt::from(65691), BigInt::from(47450))
        );
    }

    #[test]
    fn multbox_ratio_matches_enumeration_oracle() {
        // True union over all k < n, computed element-by-element in the
        // group of quotients, against the closed form.
        let fam = FolnerFamily::MultBoxPaper;
        let (closed, _) = fam.tempered_ratio(2, Mode::Group, None, 1 << 30).unwrap();
        let enumerated = fam
            .tempered_ratio_enumerated(2, Mode::Group, None, 10_000_000)
            .unwrap();
        assert_eq!(closed, enumerated);

        let small = FolnerFamily::MultBoxF {
            f: GrowthFn::PowK(1),
        };
        for n in 2..=4u64 {
            let (closed, _) = small.tempered_ratio(n, Mode::Group, None, 1 << 30).unwrap();
            let enumerated = small
                .tempered_ratio_enumerated(n, Mode::Group, None, 10_000_000)
                .unwrap();
            assert_eq!(closed, enumerated, "n={n}");
        }
    }

    #[test]
    fn multbox_semigroup_mode_examples() {
        let fam = FolnerFamily::MultBoxF {
            f: GrowthFn::PowK(1),
        };
        // Identity translate collapses to F_n inside the semigroup.
        let e = Element::NatMul(ExpVec::one());
        let (r, _) = fam
            .tempered_ratio(3, Mode::Semigroup, Some(&e), 1 << 30)
            .unwrap();
        assert_eq!(r, BigRational::one());
        let enumerated = fam
            .tempered_ratio_enumerated(3, Mode::Semigroup, Some(&e), 10_000_000)
            .unwrap();
        assert_eq!(r, enumerated);

        // A denominator-clearing translate recovers the group-mode count.
        let (group, _) = fam.tempered_ratio(3, Mode::Group, None, 1 << 30).unwrap();
        let big = Element::NatMul(ExpVec::new(vec![(0, 60), (1, 60), (2, 60)]));
        let (semi, _) = fam
            .tempered_ratio(3, Mode::Semigroup, Some(&big), 1 << 30)
            .unwrap();
        assert_eq!(group, semi);
        // And matches its own enumeration.
        let enumerated = fam
            .tempered_ratio_enumerated(3, Mode::Semigroup, Some(&big), 50_000_000)
            .unwrap();
        assert_eq!(semi, enumerated);
    }

    #[test]
    fn heis_quotient_counts_frozen() {
        // Counts frozen from two independent routes (pairwise products and
        // per-column interval unions).
        let expected = [(2u64, 635u64), (3, 3987), (4, 14163), (5, 37163)];
        for (n, count) in expected {
            let rep = heisenberg_quotient_count(n, 100_000_000).unwrap();
            assert_eq!(rep.count, count, "n={n}");
            assert!(rep.within_bound);
            assert_eq!(
                rep.family_cardinality,
                (2 * n + 1) * (2 * n + 1) * (2 * n * n + 1)
            );
        }
        assert!(heisenberg_quotient_count(1, 1000).is_err());
    }

    #[test]
    fn heis_quotient_matches_generic_oracle() {
        // Element-by-element quotient set in the Heisenberg group.
        let fam = FolnerFamily::HeisBox;
        for n in 2..=3u64 {
            let (ratio, method) = fam.tempered_ratio(n, Mode::Group, None, 10_000_000).unwrap();
            assert_eq!(method, RatioMethod::Enumeration);
            let oracle = fam
                .tempered_ratio_enumerated(n, Mode::Group, None, 10_000_000)
                .unwrap();
            assert_eq!(ratio, oracle, "n={n}");
        }
    }

    #[test]
    fn chains_have_unit_ratio() {
        for (fam, n) in [
            (FolnerFamily::SymChain, 4u64),
            (FolnerFamily::PolyHeisChain { q: 2 }, 2),
        ] {
            let (r, _) = fam.tempered_ratio(n, Mode::Group, None, 1 << 30).unwrap();
            assert_eq!(r, BigRational::one(), "{fam}");
            let oracle = fam
                .tempered_ratio_enumerated(n, Mode::Group, None, 50_000_000)
                .unwrap();
            assert_eq!(oracle, BigRational::one(), "{fam}");
        }
    }

    #[test]
    fn scan_finds_violation_for_square_growth() {
        let fam = FolnerFamily::MultBoxF {
            f: GrowthFn::PowK(2),
        };
        let rep = temperedness_scan(&fam, 50, 100.0, Mode::Group, &[], 1 << 40).unwrap();
        assert_eq!(rep.first_violation, Some(9));
        assert!(rep.sup > 100.0);
    }

    #[test]
    fn scan_self_power_stays_small() {
        let fam = FolnerFamily::MultBoxF {
            f: GrowthFn::SelfPow,
        };
        let rep = temperedness_scan(&fam, 50, 4.0, Mode::Group, &[], 1 << 40).unwrap();
        assert_eq!(rep.first_violation, None);
        assert!(rep.sup < 4.0);
        // (1 + 4^4/(5^5+1))^4 at n=5.
        let at5 = &rep.ratios[3];
        assert_eq!(at5.n, 5);
        assert!((at5.approx - 1.3700566288440243).abs() < 1e-12);
    }

    #[test]
    fn interval_scan_bounded_by_two() {
        let rep =
            temperedness_scan(&interval_1_to_n(), 60, 2.0, Mode::Group, &[], 1 << 20).unwrap();
        assert_eq!(rep.first_violation, None);
    }

    #[test]
    fn non_nested_interval_union_is_exact() {
        // [n^2, n^2+n] is a Folner family whose sets are not nested; the
        // ratio must still be the exact union size.
        let fam = FolnerFamily::Interval {
            a: "n^2".parse().unwrap(),
            b: "n^2+n".parse().unwrap(),
        };
        // Union over k<n is [n, n^2+n-1] (size n^2), |F_n| = n+1.
        for n in [3u64, 10, 20] {
            let (r, _) = fam.tempered_ratio(n, Mode::Group, None, 1 << 20).unwrap();
            assert_eq!(
                r,
                BigRational::new(BigInt::from(n * n), BigInt::from(n + 1)),
                "n={n}"
            );
        }
        // And it grows without bound: ratio at n=101 already exceeds 100.
        let (r, _) = fam.tempered_ratio(101, Mode::Group, None, 1 << 20).unwrap();
        assert!(ratio_to_f64(&r) > 100.0);
    }

    #[test]
    fn criterion_5_3_examples() {
        let sq = criterion_5_3(&GrowthFn::PowK(2), 50).unwrap();
        let last = sq.values.last().unwrap();
        assert_eq!(last.ratio, "125000/2601");
        assert!((last.approx - 48.05843906189927).abs() < 1e-9);
        assert!(sq.growing_tail);

        let selfpow = criterion_5_3(&GrowthFn::SelfPow, 50).unwrap();
        let at5 = &selfpow.values[4];
        assert_eq!(at5.ratio, "15625/46656");
        assert!((selfpow.max - 0.36424302169309986).abs() < 1e-9);
        assert!(!selfpow.growing_tail);

        assert!(matches!(
            criterion_5_3(&GrowthFn::Const(7), 20),
            Err(FolnerError::DoesNotDiverge(_))
        ));
    }

    #[test]
    fn family_parse_roundtrip() {
        for s in [
            "interval:a=n^2,b=n^2+n",
            "multbox:paper",
            "multbox:f=n^n",
            "multbox:f=n^2",
            "multbox:eps=1/2",
            "heisbox",
            "heisbox:p=n,q=n^2",
            "chain:sym",
            "chain:polyheis:q=2",
        ] {
            let fam: FolnerFamily = s.parse().unwrap();
            let back: FolnerFamily = fam.to_string().parse().unwrap();
            assert_eq!(fam, back, "roundtrip failed for {s}");
        }
        assert!("multbox:f=bogus".parse::<FolnerFamily>().is_err());
        assert!("chain:polyheis:q=4".parse::<FolnerFamily>().is_err());
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let fam = FolnerFamily::MultBoxPaper;
        assert!(matches!(
            fam.elements(3, 1000),
            Err(FolnerError::EnumerationTooLarge { .. })
        ));
        assert!(matches!(
            fam.tempered_ratio_enumerated(3, Mode::Group, None, 1000),
            Err(FolnerError::EnumerationTooLarge { .. })
        ));
    }
}
