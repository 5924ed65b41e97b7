//! Exact arithmetic in the concrete (semi)groups: (Z,+), (N,·) as prime
//! exponent vectors, its group of quotients Q+, the integer Heisenberg
//! group, finite permutations of N, and the Heisenberg group over F_q[x].

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Prime universe for exponent vectors: the first 64 primes. Inputs that
/// factor outside it are rejected rather than silently extended.
pub const PRIMES: [u64; 64] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181,
    191, 193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281,
    283, 293, 307, 311,
];

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SgError {
    #[error("elements have different tags: {0} vs {1}")]
    TagMismatch(&'static str, &'static str),
    #[error("{0} is a semigroup, not a group")]
    NotAGroup(&'static str),
    #[error("{0} does not factor over the fixed prime universe")]
    PrimeUniverseExceeded(u64),
    #[error("cannot parse element `{0}`")]
    Parse(String),
    #[error("permutation map is not a bijection")]
    NotABijection,
}

/// Sparse prime-exponent vector, sorted by prime index with no zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExpVec {
    exps: Vec<(u16, i64)>,
}

impl ExpVec {
    pub fn new(exps: Vec<(u16, i64)>) -> Self {
        let mut map: BTreeMap<u16, i64> = BTreeMap::new();
        for (i, e) in exps {
            *map.entry(i).or_insert(0) += e;
        }
        map.retain(|_, e| *e != 0);
        ExpVec {
            exps: map.into_iter().collect(),
        }
    }

    pub fn one() -> Self {
        ExpVec::default()
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exps(&self) -> &[(u16, i64)] {
        &self.exps
    }

    pub fn exponent(&self, prime_index: u16) -> i64 {
        self.exps
            .iter()
            .find(|&&(i, _)| i == prime_index)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    /// Largest prime index (0-based) used, if any.
    pub fn max_prime_index(&self) -> Option<u16> {
        self.exps.last().map(|&(i, _)| i)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.exps.iter().all(|&(_, e)| e >= 0)
    }

    pub fn add(&self, other: &ExpVec) -> ExpVec {
        let mut map: BTreeMap<u16, i64> = self.exps.iter().copied().collect();
        for &(i, e) in &other.exps {
            *map.entry(i).or_insert(0) += e;
        }
        ExpVec::new(map.into_iter().collect())
    }

    pub fn sub(&self, other: &ExpVec) -> ExpVec {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ExpVec {
        ExpVec {
            exps: self.exps.iter().map(|&(i, e)| (i, -e)).collect(),
        }
    }

    pub fn factor(mut n: u64) -> Result<ExpVec, SgError> {
        if n == 0 {
            return Err(SgError::Parse("0 is not in (N,*)".into()));
        }
        let original = n;
        let mut exps = Vec::new();
        for (idx, &p) in PRIMES.iter().enumerate() {
            if n == 1 {
                break;
            }
            let mut e = 0i64;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e != 0 {
                exps.push((idx as u16, e));
            }
        }
        if n != 1 {
            return Err(SgError::PrimeUniverseExceeded(original));
        }
        Ok(ExpVec { exps })
    }

    /// Value as a natural number; `None` when any exponent is negative.
    pub fn value(&self) -> Option<BigUint> {
        if !self.is_nonnegative() {
            return None;
        }
        let mut v = BigUint::one();
        for &(i, e) in &self.exps {
            v *= BigUint::from(PRIMES[i as usize]).pow(e as u32);
        }
        Some(v)
    }

    /// Value as an exact positive rational, for display.
    pub fn value_ratio(&self) -> (BigUint, BigUint) {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for &(i, e) in &self.exps {
            let p = BigUint::from(PRIMES[i as usize]);
            if e >= 0 {
                num *= p.pow(e as u32);
            } else {
                den *= p.pow((-e) as u32);
            }
        }
        (num, den)
    }
}

/// Finite permutation of N, stored as its non-fixed points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Permutation {
    map: BTreeMap<u32, u32>,
}

impl Permutation {
    pub fn identity() -> Self {
        Permutation::default()
    }

    pub fn from_map(map: BTreeMap<u32, u32>) -> Result<Self, SgError> {
        let keys: BTreeSet<u32> = map.keys().copied().collect();
        let vals: BTreeSet<u32> = map.values().copied().collect();
        if keys != vals {
            return Err(SgError::NotABijection);
        }
        let mut cleaned = map;
        cleaned.retain(|k, v| k != v);
        Ok(Permutation { map: cleaned })
    }

    pub fn from_cycle(cycle: &[u32]) -> Result<Self, SgError> {
        let mut map = BTreeMap::new();
        if cycle.len() < 2 {
            return Ok(Permutation::identity());
        }
        for w in 0..cycle.len() {
            let from = cycle[w];
            let to = cycle[(w + 1) % cycle.len()];
            if map.insert(from, to).is_some() {
                return Err(SgError::NotABijection);
            }
        }
        Permutation::from_map(map)
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.map.get(&x).copied().unwrap_or(x)
    }

    /// `(self . other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let mut points: BTreeSet<u32> = self.map.keys().copied().collect();
        points.extend(other.map.keys());
        let mut map = BTreeMap::new();
        for x in points {
            let y = self.apply(other.apply(x));
            if y != x {
                map.insert(x, y);
            }
        }
        Permutation { map }
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            map: self.map.iter().map(|(&k, &v)| (v, k)).collect(),
        }
    }

    /// Largest moved point, if any.
    pub fn max_moved(&self) -> Option<u32> {
        self.map.keys().last().copied()
    }

    pub fn non_fixed(&self) -> &BTreeMap<u32, u32> {
        &self.map
    }
}

/// Polynomial over F_q (prime q), little-endian coefficients, normalized.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FqPoly {
    coeffs: Vec<u32>,
}

impl FqPoly {
    pub fn new(mut coeffs: Vec<u32>, q: u32) -> Self {
        for c in &mut coeffs {
            *c %= q;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FqPoly { coeffs }
    }

    pub fn zero() -> Self {
        FqPoly::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; -1 for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn add(&self, other: &FqPoly, q: u32) -> FqPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0u32; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            *slot = (a + b) % q;
        }
        FqPoly::new(out, q)
    }

    pub fn neg(&self, q: u32) -> FqPoly {
        FqPoly::new(self.coeffs.iter().map(|&c| (q - c) % q).collect(), q)
    }

    pub fn sub(&self, other: &FqPoly, q: u32) -> FqPoly {
        self.add(&other.neg(q), q)
    }

    pub fn mul(&self, other: &FqPoly, q: u32) -> FqPoly {
        if self.is_zero() || other.is_zero() {
            return FqPoly::zero();
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u64 * b as u64) % q as u64;
            }
        }
        FqPoly::new(out.into_iter().map(|c| c as u32).collect(), q)
    }
}

/// Heisenberg triple over F_q[x] with the same composition law as the
/// integer Heisenberg group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyHeisElt {
    pub q: u32,
    pub f: FqPoly,
    pub g: FqPoly,
    pub h: FqPoly,
}

/// Tagged element of one of the concrete (semi)groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    IntAdd(BigInt),
    NatMul(ExpVec),
    QPos(ExpVec),
    Heisenberg(BigInt, BigInt, BigInt),
    FinPerm(Permutation),
    PolyHeis(PolyHeisElt),
}

impl Element {
    pub fn tag(&self) -> &'static str {
        match self {
            Element::IntAdd(_) => "int",
            Element::NatMul(_) => "natmul",
            Element::QPos(_) => "qpos",
            Element::Heisenberg(..) => "heis",
            Element::FinPerm(_) => "perm",
            Element::PolyHeis(_) => "polyheis",
        }
    }

    pub fn nat_from_u64(n: u64) -> Result<Element, SgError> {
        Ok(Element::NatMul(ExpVec::factor(n)?))
    }

    pub fn heis(a: i64, b: i64, c: i64) -> Element {
        Element::Heisenberg(BigInt::from(a), BigInt::from(b), BigInt::from(c))
    }

    /// Identity of the same tag.
    pub fn identity_like(&self) -> Element {
        match self {
            Element::IntAdd(_) => Element::IntAdd(BigInt::zero()),
            Element::NatMul(_) => Element::NatMul(ExpVec::one()),
            Element::QPos(_) => Element::QPos(ExpVec::one()),
            Element::Heisenberg(..) => {
                Element::Heisenberg(BigInt::zero(), BigInt::zero(), BigInt::zero())
            }
            Element::FinPerm(_) => Element::FinPerm(Permutation::identity()),
            Element::PolyHeis(p) => Element::PolyHeis(PolyHeisElt {
                q: p.q,
                f: FqPoly::zero(),
                g: FqPoly::zero(),
                h: FqPoly::zero(),
            }),
        }
    }

    pub fn is_identity(&self) -> bool {
        self == &self.identity_like()
    }

    /// View a NatMul element inside the group of quotients.
    pub fn to_qpos(&self) -> Option<Element> {
        match self {
            Element::NatMul(v) | Element::QPos(v) => Some(Element::QPos(v.clone())),
            _ => None,
        }
    }
}

/// Tag-checked composition.
pub fn mul(x: &Element, y: &Element) -> Result<Element, SgError> {
    match (x, y) {
        (Element::IntAdd(a), Element::IntAdd(b)) => Ok(Element::IntAdd(a + b)),
        (Element::NatMul(a), Element::NatMul(b)) => Ok(Element::NatMul(a.add(b))),
        (Element::QPos(a), Element::QPos(b)) => Ok(Element::QPos(a.add(b))),
        (Element::Heisenberg(x1, y1, z1), Element::Heisenberg(a, b, c)) => Ok(
            // (x, y, z) * (a, b, c) = (x + a, y + b, z + x b + c)
            Element::Heisenberg(x1 + a, y1 + b, z1 + x1 * b + c),
        ),
        (Element::FinPerm(s), Element::FinPerm(t)) => Ok(Element::FinPerm(s.compose(t))),
        (Element::PolyHeis(u), Element::PolyHeis(v)) if u.q == v.q => {
            let q = u.q;
            Ok(Element::PolyHeis(PolyHeisElt {
                q,
                f: u.f.add(&v.f, q),
                g: u.g.add(&v.g, q),
                h: u.h.add(&u.f.mul(&v.g, q), q).add(&v.h, q),
            }))
        }
        _ => Err(SgError::TagMismatch(x.tag(), y.tag())),
    }
}

/// Inverse; defined for the group tags only.
pub fn inv(x: &Element) -> Result<Element, SgError> {
    match x {
        Element::IntAdd(a) => Ok(Element::IntAdd(-a)),
        Element::NatMul(_) => Err(SgError::NotAGroup("natmul")),
        Element::QPos(a) => Ok(Element::QPos(a.neg())),
        // (x, y, z)^-1 = (-x, -y, x y - z)
        Element::Heisenberg(a, b, c) => Ok(Element::Heisenberg(-a, -b, a * b - c)),
        Element::FinPerm(p) => Ok(Element::FinPerm(p.inverse())),
        Element::PolyHeis(p) => Ok(Element::PolyHeis(PolyHeisElt {
            q: p.q,
            f: p.f.neg(p.q),
            g: p.g.neg(p.q),
            h: p.f.mul(&p.g, p.q).sub(&p.h, p.q),
        })),
    }
}

/// `A^-1 B`. In group tags this is `{a^-1 b}`; in (N,·) it is the set of
/// `h` in the semigroup with `a h` landing in `B` for some `a` in `A`.
pub fn left_quotient_set(
    a_set: &[Element],
    b_set: &[Element],
) -> Result<BTreeSet<Element>, SgError> {
    let mut out = BTreeSet::new();
    for a in a_set {
        for b in b_set {
            match (a, b) {
                (Element::NatMul(av), Element::NatMul(bv)) => {
                    let h = bv.sub(av);
                    if h.is_nonnegative() {
                        out.insert(Element::NatMul(h));
                    }
                }
                _ => {
                    out.insert(mul(&inv(a)?, b)?);
                }
            }
        }
    }
    Ok(out)
}

/// `A^-1 (B g)`.
pub fn right_translate_quotient(
    a_set: &[Element],
    b_set: &[Element],
    g: &Element,
) -> Result<BTreeSet<Element>, SgError> {
    let translated: Result<Vec<Element>, SgError> = b_set.iter().map(|b| mul(b, g)).collect();
    left_quotient_set(a_set, &translated?)
}

/// Smallest natural g (as an exponent vector) with `F g` inside (N,·).
pub fn clear_denominators(f_set: &[ExpVec]) -> ExpVec {
    let mut mins: BTreeMap<u16, i64> = BTreeMap::new();
    for v in f_set {
        for &(i, e) in v.exps() {
            let slot = mins.entry(i).or_insert(0);
            *slot = (*slot).min(e);
        }
    }
    ExpVec::new(mins.into_iter().map(|(i, e)| (i, -e.min(0))).collect())
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::IntAdd(a) => write!(f, "int:{a}"),
            Element::NatMul(v) => {
                let (num, _) = v.value_ratio();
                write!(f, "natmul:{num}")
            }
            Element::QPos(v) => {
                let (num, den) = v.value_ratio();
                write!(f, "qpos:{num}/{den}")
            }
            Element::Heisenberg(a, b, c) => write!(f, "heis:({a},{b},{c})"),
            Element::FinPerm(p) => {
                if p.non_fixed().is_empty() {
                    return write!(f, "perm:()");
                }
                write!(f, "perm:")?;
                let mut seen = BTreeSet::new();
                for &start in p.non_fixed().keys() {
                    if seen.contains(&start) {
                        continue;
                    }
                    let mut cycle = vec![start];
                    seen.insert(start);
                    let mut cur = p.apply(start);
                    while cur != start {
                        cycle.push(cur);
                        seen.insert(cur);
                        cur = p.apply(cur);
                    }
                    write!(
                        f,
                        "({})",
                        cycle
                            .iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    )?;
                }
                Ok(())
            }
            Element::PolyHeis(p) => {
                write!(
                    f,
                    "polyheis:q={};f={};g={};h={}",
                    p.q,
                    fq_poly_string(&p.f),
                    fq_poly_string(&p.g),
                    fq_poly_string(&p.h)
                )
            }
        }
    }
}

fn fq_poly_string(p: &FqPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (i, &c) in p.coeffs().iter().enumerate() {
        if c == 0 {
            continue;
        }
        let part = match (i, c) {
            (0, c) => c.to_string(),
            (1, 1) => "x".to_string(),
            (1, c) => format!("{c}x"),
            (i, 1) => format!("x^{i}"),
            (i, c) => format!("{c}x^{i}"),
        };
        parts.push(part);
    }
    parts.join("+")
}

/// Parse an F_q[x] polynomial written like `x^2+x+1` or `0`.
pub fn parse_fq_poly(s: &str, q: u32) -> Result<FqPoly, SgError> {
    let err = || SgError::Parse(s.to_string());
    let mut coeffs: Vec<u32> = Vec::new();
    for term in s.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(err());
        }
        let (coeff, pow) = if let Some(rest) = term.strip_prefix("x^") {
            (1u32, rest.parse::<usize>().map_err(|_| err())?)
        } else if term == "x" {
            (1, 1)
        } else if let Some((c, p)) = term.split_once("x^") {
            (c.parse().map_err(|_| err())?, p.parse().map_err(|_| err())?)
        } else if let Some(c) = term.strip_suffix('x') {
            (c.parse().map_err(|_| err())?, 1)
        } else {
            (term.parse().map_err(|_| err())?, 0)
        };
        if coeffs.len() <= pow {
            coeffs.resize(pow + 1, 0);
        }
        coeffs[pow] = (coeffs[pow] + coeff) % q;
    }
    Ok(FqPoly::new(coeffs, q))
}

impl std::str::FromStr for Element {
    type Err = SgError;

    /// Canonical textual forms: `int:5`, `natmul:2^3*3*5` or `natmul:120`,
    /// `qpos:2/3`, `heis:(1,0,2)`, `perm:(1 2 3)(5 6)`,
    /// `polyheis:q=2;f=x+1;g=x;h=x^2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SgError::Parse(s.to_string());
        let (tag, body) = s.split_once(':').ok_or_else(err)?;
        match tag {
            "int" => Ok(Element::IntAdd(body.parse().map_err(|_| err())?)),
            "natmul" => {
                if body.contains(['*', '^']) {
                    let mut v = ExpVec::one();
                    for factor in body.split('*') {
                        let (p, e) = match factor.split_once('^') {
                            Some((p, e)) => (
                                p.parse::<u64>().map_err(|_| err())?,
                                e.parse::<i64>().map_err(|_| err())?,
                            ),
                            None => (factor.parse::<u64>().map_err(|_| err())?, 1),
                        };
                        let idx = PRIMES
                            .iter()
                            .position(|&q| q == p)
                            .ok_or(SgError::PrimeUniverseExceeded(p))?;
                        v = v.add(&ExpVec::new(vec![(idx as u16, e)]));
                    }
                    if !v.is_nonnegative() {
                        return Err(err());
                    }
                    Ok(Element::NatMul(v))
                } else {
                    Element::nat_from_u64(body.parse().map_err(|_| err())?)
                }
            }
            "qpos" => {
                let (num, den) = match body.split_once('/') {
                    Some((n, d)) => (
                        n.parse::<u64>().map_err(|_| err())?,
                        d.parse::<u64>().map_err(|_| err())?,
                    ),
                    None => (body.parse::<u64>().map_err(|_| err())?, 1),
                };
                let v = ExpVec::factor(num)?.sub(&ExpVec::factor(den)?);
                Ok(Element::QPos(v))
            }
            "heis" => {
                let body = body
                    .strip_prefix('(')
                    .and_then(|b| b.strip_suffix(')'))
                    .ok_or_else(err)?;
                let parts: Vec<&str> = body.split(',').collect();
                if parts.len() != 3 {
                    return Err(err());
                }
                Ok(Element::Heisenberg(
                    parts[0].trim().parse().map_err(|_| err())?,
                    parts[1].trim().parse().map_err(|_| err())?,
                    parts[2].trim().parse().map_err(|_| err())?,
                ))
            }
            "perm" => {
                let mut perm = Permutation::identity();
                let mut rest = body.trim();
                if rest == "()" {
                    return Ok(Element::FinPerm(perm));
                }
                while !rest.is_empty() {
                    let open = rest.strip_prefix('(').ok_or_else(err)?;
                    let close = open.find(')').ok_or_else(err)?;
                    let cycle: Result<Vec<u32>, _> =
                        open[..close].split_whitespace().map(str::parse).collect();
                    let cycle = cycle.map_err(|_| err())?;
                    perm = perm.compose(&Permutation::from_cycle(&cycle)?);
                    rest = &open[close + 1..];
                }
                Ok(Element::FinPerm(perm))
            }
            "polyheis" => {
                let mut q = None;
                let mut f = None;
                let mut g = None;
                let mut h = None;
                for part in body.split(';') {
                    let (k, v) = part.split_once('=').ok_or_else(err)?;
                    match k.trim() {
                        "q" => q = Some(v.trim().parse::<u32>().map_err(|_| err())?),
                        "f" => f = Some(v.trim().to_string()),
                        "g" => g = Some(v.trim().to_string()),
                        "h" => h = Some(v.trim().to_string()),
                        _ => return Err(err()),
                    }
                }
                let q = q.ok_or_else(err)?;
                Ok(Element::PolyHeis(PolyHeisElt {
                    q,
                    f: parse_fq_poly(&f.ok_or_else(err)?, q)?,
                    g: parse_fq_poly(&g.ok_or_else(err)?, q)?,
                    h: parse_fq_poly(&h.ok_or_else(err)?, q)?,
                }))
            }
            _ => Err(err()),
        }
    }
}
