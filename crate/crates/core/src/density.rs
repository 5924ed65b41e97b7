//! Windowed sets of integers and their difference-set combinatorics:
//! densities along interval Følner families, the shifted difference sets
//! `Delta_1`, `Delta_{2,g}`, gap/run statistics, the two exactly
//! reproducible membership examples, and translate-cover search.
//!
//! Everything is a statement about a finite window. No operation claims a
//! limit: densities carry their index trajectory and the `Delta_2`
//! positivity test is an explicit threshold on a finite tail.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bitset::Bitset;
use crate::folner::{FolnerError, FolnerFamily};
use crate::semigroup::Element;
use crate::seq::{PrecisionPolicy, SeqError, SequenceSpec};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum DensityError {
    #[error("family set F_{n} is not contained in the window")]
    FamilyExceedsWindow { n: u64 },
    #[error("family elements must be integers for windowed densities")]
    NotAnIntegerFamily,
    #[error("sets live in different windows")]
    WindowMismatch,
    #[error("window of radius {window} cannot certify a cover of radius {target}")]
    TargetExceedsWindow { window: u64, target: u64 },
    #[error("no cover with at most {l_max} translates found")]
    CoverFailure { l_max: usize },
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Folner(#[from] FolnerError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    #[serde(rename = "N")]
    Nat,
    #[serde(rename = "Z")]
    Int,
}

/// Finite truncation of a subset of N or Z with bitset membership.
///
/// `Nat` windows hold values `1..=horizon`; `Int` windows hold
/// `-horizon..=horizon`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowedSet {
    domain: Domain,
    horizon: u64,
    bits: Bitset,
}

impl WindowedSet {
    pub fn empty(domain: Domain, horizon: u64) -> Self {
        assert!(horizon >= 1);
        let len = match domain {
            Domain::Nat => horizon,
            Domain::Int => 2 * horizon + 1,
        };
        WindowedSet {
            domain,
            horizon,
            bits: Bitset::new(len as usize),
        }
    }

    pub fn from_members(
        domain: Domain,
        horizon: u64,
        members: impl IntoIterator<Item = i64>,
    ) -> Self {
        let mut s = Self::empty(domain, horizon);
        for v in members {
            s.insert(v);
        }
        s
    }

    pub fn nat_from_predicate(horizon: u64, pred: impl Fn(u64) -> bool) -> Self {
        let mut s = Self::empty(Domain::Nat, horizon);
        for v in 1..=horizon {
            if pred(v) {
                s.bits.set((v - 1) as usize);
            }
        }
        s
    }

    /// Multiples of `k` in the window (over Z: both signs and 0).
    pub fn multiples(domain: Domain, horizon: u64, k: u64) -> Self {
        assert!(k >= 1);
        let mut s = Self::empty(domain, horizon);
        match domain {
            Domain::Nat => {
                let mut v = k;
                while v <= horizon {
                    s.bits.set((v - 1) as usize);
                    v += k;
                }
            }
            Domain::Int => {
                let mut v = 0i64;
                while v <= horizon as i64 {
                    s.insert(v);
                    s.insert(-v);
                    v += k as i64;
                }
            }
        }
        s
    }

    pub fn squares(horizon: u64) -> Self {
        let mut s = Self::empty(Domain::Nat, horizon);
        let mut k = 1u64;
        while k * k <= horizon {
            s.bits.set((k * k - 1) as usize);
            k += 1;
        }
        s
    }

    pub fn full(domain: Domain, horizon: u64) -> Self {
        match domain {
            Domain::Nat => Self::nat_from_predicate(horizon, |_| true),
            Domain::Int => {
                Self::from_members(domain, horizon, -(horizon as i64)..=horizon as i64)
            }
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    fn index_of(&self, v: i64) -> Option<usize> {
        match self.domain {
            Domain::Nat => {
                if v >= 1 && v as u64 <= self.horizon {
                    Some((v - 1) as usize)
                } else {
                    None
                }
            }
            Domain::Int => {
                if v.unsigned_abs() <= self.horizon {
                    Some((v + self.horizon as i64) as usize)
                } else {
                    None
                }
            }
        }
    }

    fn value_of(&self, idx: usize) -> i64 {
        match self.domain {
            Domain::Nat => idx as i64 + 1,
            Domain::Int => idx as i64 - self.horizon as i64,
        }
    }

    pub fn insert(&mut self, v: i64) {
        if let Some(i) = self.index_of(v) {
            self.bits.set(i);
        }
    }

    pub fn member(&self, v: i64) -> bool {
        self.index_of(v).map_or(false, |i| self.bits.get(i))
    }

    pub fn count(&self) -> u64 {
        self.bits.count_ones() as u64
    }

    pub fn members(&self) -> Vec<i64> {
        self.bits.ones().map(|i| self.value_of(i)).collect()
    }

    pub fn complement(&self) -> WindowedSet {
        let mut out = Self::empty(self.domain, self.horizon);
        for i in 0..self.bits.len() {
            if !self.bits.get(i) {
                out.bits.set(i);
            }
        }
        out
    }

    pub fn intersect(&self, other: &WindowedSet) -> Result<WindowedSet, DensityError> {
        if self.domain != other.domain || self.horizon != other.horizon {
            return Err(DensityError::WindowMismatch);
        }
        let mut out = self.clone();
        out.bits.and_assign(&other.bits);
        Ok(out)
    }

    /// `S - k` within the window: values v with `v + k` in S.
    pub fn shift_down(&self, k: u64) -> WindowedSet {
        WindowedSet {
            domain: self.domain,
            horizon: self.horizon,
            bits: self.bits.shifted_down(k as usize),
        }
    }

    /// Exact `|S ∩ (S - k)|` within the window.
    pub fn delta3_count(&self, k: u64) -> u64 {
        self.bits.count_shift_and(k as usize) as u64
    }

    /// Count of members in the value interval `[lo, hi]`.
    pub fn count_interval(&self, lo: i64, hi: i64) -> Option<u64> {
        let li = self.index_of(lo)?;
        let hi_idx = self.index_of(hi)?;
        Some(self.bits.count_range(li, hi_idx + 1) as u64)
    }

    /// Run-length encoding of the member values, as inclusive `[a, b]` runs.
    pub fn runs(&self) -> Vec<(i64, i64)> {
        let mut runs = Vec::new();
        let mut cur: Option<(i64, i64)> = None;
        for v in self.bits.ones().map(|i| self.value_of(i)) {
            match cur {
                Some((a, b)) if v == b + 1 => cur = Some((a, v)),
                Some(done) => {
                    runs.push(done);
                    cur = Some((v, v));
                }
                None => cur = Some((v, v)),
            }
        }
        if let Some(done) = cur {
            runs.push(done);
        }
        runs
    }

    pub fn from_runs(
        domain: Domain,
        horizon: u64,
        runs: &[(i64, i64)],
    ) -> WindowedSet {
        let mut s = Self::empty(domain, horizon);
        for &(a, b) in runs {
            for v in a..=b {
                s.insert(v);
            }
        }
        s
    }

    /// One-integer-per-line interchange format.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for v in self.members() {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_lines(domain: Domain, horizon: u64, text: &str) -> Result<Self, String> {
        let mut s = Self::empty(domain, horizon);
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v: i64 = line.parse().map_err(|_| format!("bad integer `{line}`"))?;
            s.insert(v);
        }
        Ok(s)
    }
}

/// Serialized as run-length-encoded JSON:
/// `{"domain":"N","horizon":100,"runs":[[4,4],[8,8]]}`.
#[derive(Serialize, Deserialize)]
struct WindowedSetRepr {
    domain: Domain,
    horizon: u64,
    runs: Vec<(i64, i64)>,
}

impl Serialize for WindowedSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        WindowedSetRepr {
            domain: self.domain,
            horizon: self.horizon,
            runs: self.runs(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WindowedSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = WindowedSetRepr::deserialize(deserializer)?;
        Ok(WindowedSet::from_runs(repr.domain, repr.horizon, &repr.runs))
    }
}

/// Exact density ratios `|S ∩ F_n| / |F_n|` along an interval family.
#[derive(Clone, Debug)]
pub struct DensityEstimate {
    pub indices: Vec<u64>,
    pub ratios: Vec<BigRational>,
    /// Max/min over the last 20% of indices: finite stand-ins for
    /// limsup/liminf.
    pub running_max_tail: BigRational,
    pub running_min_tail: BigRational,
}

impl DensityEstimate {
    pub fn last_ratio(&self) -> &BigRational {
        self.ratios.last().expect("at least one index")
    }
}

/// Densities of `S` along `F_1..F_{n_max}`; the family must generate
/// integer sets inside the window of `S`.
pub fn windowed_density(
    set: &WindowedSet,
    family: &FolnerFamily,
    n_max: u64,
) -> Result<DensityEstimate, DensityError> {
    assert!(n_max >= 1);
    let mut indices = Vec::with_capacity(n_max as usize);
    let mut ratios = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        // Interval families admit an O(1) window check plus popcount; any
        // other integer-valued family is counted element by element.
        let (hits, card) = match family {
            FolnerFamily::Interval { a, b } => {
                let (lo, hi) = (a.eval(n)?, b.eval(n)?);
                let inside = match set.domain {
                    Domain::Nat => lo >= 1 && hi >= lo && hi as u64 <= set.horizon,
                    Domain::Int => {
                        hi >= lo
                            && lo.unsigned_abs() <= set.horizon
                            && hi.unsigned_abs() <= set.horizon
                    }
                };
                if !inside {
                    return Err(DensityError::FamilyExceedsWindow { n });
                }
                let hits = set.count_interval(lo, hi).expect("checked window");
                (hits, (hi - lo + 1) as u64)
            }
            _ => {
                let elems = family.elements(n, 1 << 24)?;
                let mut hits = 0u64;
                for e in &elems {
                    let k = match e {
                        Element::IntAdd(k) => {
                            k.to_i64().ok_or(DensityError::NotAnIntegerFamily)?
                        }
                        _ => return Err(DensityError::NotAnIntegerFamily),
                    };
                    let in_window = match set.domain {
                        Domain::Nat => k >= 1 && k as u64 <= set.horizon,
                        Domain::Int => k.unsigned_abs() <= set.horizon,
                    };
                    if !in_window {
                        return Err(DensityError::FamilyExceedsWindow { n });
                    }
                    if set.member(k) {
                        hits += 1;
                    }
                }
                (hits, elems.len() as u64)
            }
        };
        indices.push(n);
        ratios.push(BigRational::new(BigInt::from(hits), BigInt::from(card)));
    }
    let tail_start = tail_start(ratios.len());
    let tail = &ratios[tail_start..];
    let running_max_tail = tail.iter().max().unwrap().clone();
    let running_min_tail = tail.iter().min().unwrap().clone();
    Ok(DensityEstimate {
        indices,
        ratios,
        running_max_tail,
        running_min_tail,
    })
}

/// Last 20% of the index range (at least one index).
fn tail_start(len: usize) -> usize {
    len - (len / 5).max(1)
}

/// `Delta_1(S)`: differences realized inside the window, as a symmetric
/// set over Z with the same horizon.
pub fn delta1(set: &WindowedSet) -> WindowedSet {
    let mut out = WindowedSet::empty(Domain::Int, set.horizon);
    if set.count() == 0 {
        return out;
    }
    let max_shift = set.bits.len();
    for k in 0..max_shift.min(set.horizon as usize + 1) {
        if set.bits.intersects_shift(k) {
            out.insert(k as i64);
            out.insert(-(k as i64));
        }
    }
    out
}

/// Quadratic reference implementation of `delta1`: scans all member pairs.
pub fn delta1_brute_force(set: &WindowedSet) -> WindowedSet {
    let mut out = WindowedSet::empty(Domain::Int, set.horizon);
    let members = set.members();
    for &a in &members {
        for &b in &members {
            out.insert(a - b);
        }
    }
    out
}

/// `Delta_{2,g}(S)` on a window: indices `n` such that the windowed density
/// of `S ∩ (S - [g(n)])` along the family has tail-max at least `theta`.
///
/// Positivity of an upper density is undecidable from a window; `theta` is
/// an explicit surrogate threshold, reported as part of the result contract.
pub fn delta2_g(
    set: &WindowedSet,
    spec: &SequenceSpec,
    family: &FolnerFamily,
    n_range: u64,
    family_n_max: u64,
    theta: f64,
    policy: &PrecisionPolicy,
) -> Result<WindowedSet, DensityError> {
    let mut out = WindowedSet::empty(Domain::Nat, n_range);
    for n in 1..=n_range {
        let shift = spec.floor_eval(n, policy)?.value;
        let shift = match shift.to_u64() {
            Some(s) if s < set.horizon => s,
            // Shift beyond the window: the windowed intersection is empty.
            _ => continue,
        };
        let intersection = set.intersect(&set.shift_down(shift))?;
        let density = windowed_density(&intersection, family, family_n_max)?;
        if density.running_max_tail.to_f64().unwrap_or(0.0) >= theta {
            out.insert(n as i64);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct GapRunStats {
    /// Largest difference between consecutive members.
    pub max_gap: u64,
    /// Longest run of consecutive integers in the set.
    pub max_run: u64,
    /// gap size -> number of occurrences.
    pub gap_histogram: BTreeMap<u64, u64>,
    /// gap size -> value of the left member of its first occurrence.
    pub first_gap_of_length: BTreeMap<u64, i64>,
    pub members: u64,
}

/// Exact gap and run statistics of the member sequence.
pub fn gap_run_stats(set: &WindowedSet) -> GapRunStats {
    let members = set.members();
    let mut max_gap = 0u64;
    let mut max_run = 0u64;
    let mut run = 0u64;
    let mut prev: Option<i64> = None;
    let mut gap_histogram = BTreeMap::new();
    let mut first_gap_of_length = BTreeMap::new();
    for &v in &members {
        match prev {
            Some(p) => {
                let gap = (v - p) as u64;
                *gap_histogram.entry(gap).or_insert(0) += 1;
                first_gap_of_length.entry(gap).or_insert(p);
                max_gap = max_gap.max(gap);
                if gap == 1 {
                    run += 1;
                } else {
                    run = 1;
                }
            }
            None => run = 1,
        }
        max_run = max_run.max(run);
        prev = Some(v);
    }
    GapRunStats {
        max_gap,
        max_run,
        gap_histogram,
        first_gap_of_length,
        members: members.len() as u64,
    }
}

/// Membership in `D_g` for `g(n) = 2n + 2 sqrt(n)`: `[g(n)]` divisible
/// by 4, decided by pure integer arithmetic.
pub fn example_3_13_member(n: u64) -> bool {
    (2 * n + (4 * n).isqrt()) % 4 == 0
}

/// Scan `n <= horizon` for adjacent members of `D_g`; the membership
/// pattern forbids them, so the expected result is empty.
pub fn verify_example_3_13(horizon: u64) -> Vec<u64> {
    let mut violations = Vec::new();
    let mut prev = false;
    for n in 1..=horizon {
        let cur = example_3_13_member(n);
        if cur && prev {
            violations.push(n - 1);
        }
        prev = cur;
    }
    violations
}

/// Membership in `D_{3/2}`: `[n^{3/2}]` even.
pub fn example_3_14_member(n: u64) -> bool {
    let cube = (n as u128) * (n as u128) * (n as u128);
    cube.isqrt() % 2 == 0
}

fn example_3_14_member_bigint(n: u64) -> bool {
    use num_bigint::BigUint;
    let cube = BigUint::from(n).pow(3);
    (cube.sqrt() % 2u32).is_zero()
}

/// Least `M <= bound` with `M, M+1, ..., M+run_length` all outside
/// `D_{3/2}`, re-verified through an independent big-integer route.
pub fn find_gap_3_14(run_length: u64, bound: u64) -> Option<u64> {
    let needed = run_length + 1;
    let mut run = 0u64;
    for n in 1..=bound {
        if example_3_14_member(n) {
            run = 0;
            continue;
        }
        run += 1;
        if run == needed {
            let m = n + 1 - needed;
            for k in 0..needed {
                assert!(
                    !example_3_14_member_bigint(m + k),
                    "re-verification failed at {}",
                    m + k
                );
            }
            return Some(m);
        }
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverCertificate {
    pub translates: Vec<i64>,
    pub covered_interval: (i64, i64),
    pub l: usize,
}

/// Verify that the translates of `E` cover the target interval.
pub fn verify_cover(set: &WindowedSet, cert: &CoverCertificate) -> bool {
    let (lo, hi) = cert.covered_interval;
    (lo..=hi).all(|x| cert.translates.iter().any(|&m| set.member(x - m)))
}

/// Minimal translate cover of `[-target, target]` by copies of `E`,
/// found by greedy seeding followed by exact iterative-deepening search.
pub fn cover_search(
    set: &WindowedSet,
    target: u64,
    l_max: usize,
) -> Result<CoverCertificate, DensityError> {
    assert_eq!(set.domain(), Domain::Int, "cover search expects a Z window");
    if target > set.horizon {
        return Err(DensityError::TargetExceedsWindow {
            window: set.horizon,
            target,
        });
    }
    let t = target as i64;
    let max_m = (set.horizon - target) as i64;
    let positions: Vec<i64> = (-t..=t).collect();
    let cover_of = |m: i64| -> Vec<bool> {
        positions.iter().map(|&x| set.member(x - m)).collect()
    };
    let candidates: Vec<i64> = (-max_m..=max_m)
        .filter(|&m| cover_of(m).iter().any(|&b| b))
        .collect();

    // Greedy upper bound: max new coverage, ties to the smallest translate.
    let greedy = || -> Option<Vec<i64>> {
        let mut covered = vec![false; positions.len()];
        let mut chosen = Vec::new();
        while covered.iter().any(|&b| !b) {
            let mut best: Option<(usize, i64)> = None;
            for &m in &candidates {
                let gain = cover_of(m)
                    .iter()
                    .zip(&covered)
                    .filter(|&(&c, &done)| c && !done)
                    .count();
                if gain == 0 {
                    continue;
                }
                best = Some(match best {
                    Some((bg, bm)) if bg >= gain => (bg, bm),
                    _ => (gain, m),
                });
            }
            let (_, m) = best?;
            for (slot, c) in covered.iter_mut().zip(cover_of(m)) {
                *slot |= c;
            }
            chosen.push(m);
            if chosen.len() > l_max {
                return None;
            }
        }
        Some(chosen)
    };

    // Exact search at a fixed size: branch on the first uncovered point.
    fn dfs(
        set: &WindowedSet,
        positions: &[i64],
        covered: &mut Vec<bool>,
        chosen: &mut Vec<i64>,
        depth: usize,
        max_m: i64,
    ) -> bool {
        let first = match covered.iter().position(|&b| !b) {
            Some(i) => i,
            None => return true,
        };
        if depth == 0 {
            return false;
        }
        let x = positions[first];
        // Any cover of x is a translate x - e for a member e of E.
        let mut ms: Vec<i64> = set
            .members()
            .into_iter()
            .map(|e| x - e)
            .filter(|&m| m.abs() <= max_m)
            .collect();
        ms.sort_unstable();
        for m in ms {
            let mask: Vec<usize> = positions
                .iter()
                .enumerate()
                .filter(|&(i, &p)| !covered[i] && set.member(p - m))
                .map(|(i, _)| i)
                .collect();
            if mask.is_empty() {
                continue;
            }
            for &i in &mask {
                covered[i] = true;
            }
            chosen.push(m);
            if dfs(set, positions, covered, chosen, depth - 1, max_m) {
                return true;
            }
            chosen.pop();
            for &i in &mask {
                covered[i] = false;
            }
        }
        false
    }

    let mut best = greedy();
    let start_l = best.as_ref().map(|b| b.len()).unwrap_or(l_max + 1);
    for l in 1..start_l.min(l_max + 1) {
        let mut covered = vec![false; positions.len()];
        let mut chosen = Vec::new();
        if dfs(set, &positions, &mut covered, &mut chosen, l, max_m) {
            best = Some(chosen);
            break;
        }
    }
    let translates = best.ok_or(DensityError::CoverFailure { l_max })?;
    let cert = CoverCertificate {
        l: translates.len(),
        translates,
        covered_interval: (-t, t),
    };
    assert!(verify_cover(set, &cert), "cover certificate failed re-verification");
    Ok(cert)
}

/// Density of `S ∩ (S - s_1) ∩ ... ∩ (S - s_j)` along the family.
pub fn intersection_density(
    set: &WindowedSet,
    shifts: &[u64],
    family: &FolnerFamily,
    n_max: u64,
) -> Result<DensityEstimate, DensityError> {
    let mut t = set.clone();
    for &s in shifts {
        t = t.intersect(&set.shift_down(s))?;
    }
    windowed_density(&t, family, n_max)
}
