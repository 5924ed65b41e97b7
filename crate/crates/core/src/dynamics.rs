//! Concrete measure-preserving systems at desk scale: circle rotations,
//! cyclic rotations, and finite products, with indicator observables.
//!
//! Orbit membership is decided by exact rational arithmetic when the data
//! is rational and by certified interval arithmetic otherwise; a point
//! that cannot be separated from an arc endpoint within the precision cap
//! raises an error instead of being guessed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeSet;

use crate::equidist::frac_parts;
use crate::real::RealConstant;
use crate::seq::PrecisionPolicy;

#[derive(Debug, thiserror::Error)]
pub enum DynError {
    #[error("point at step {index} is within precision radius of an arc endpoint")]
    BoundaryAmbiguous { index: usize },
    #[error("system, start point, and observable have different shapes")]
    ShapeMismatch,
    #[error("bad observable: {0}")]
    BadObservable(String),
}

/// Rotation system: circle rotation by alpha, cyclic shift on Z/mZ, or a
/// finite product of such.
#[derive(Clone, Debug)]
pub enum RotationSystem {
    Circle { alpha: RealConstant },
    Cyclic { m: u64 },
    Product(Vec<RotationSystem>),
}

/// Start point matching the system shape.
#[derive(Clone, Debug)]
pub enum Point {
    Circle(BigRational),
    Cyclic(u64),
    Product(Vec<Point>),
}

/// Half-open arc `[start, start + len)` on the circle, rational endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Arc {
    pub start: BigRational,
    pub len: BigRational,
}

/// Indicator observable matching the system shape.
#[derive(Clone, Debug)]
pub enum Observable {
    Arcs(Vec<Arc>),
    Residues(BTreeSet<u64>),
    Product(Vec<Observable>),
}

impl Observable {
    /// Normalize and validate: arcs within [0,1), positive lengths, total
    /// measure at most 1, pairwise disjoint after sorting.
    fn validated_arcs(arcs: &[Arc]) -> Result<Vec<Arc>, DynError> {
        let one = BigRational::one();
        let mut sorted = Vec::with_capacity(arcs.len());
        let mut total = BigRational::zero();
        for a in arcs {
            if a.start < BigRational::zero() || a.start >= one {
                return Err(DynError::BadObservable("arc start outside [0,1)".into()));
            }
            if a.len <= BigRational::zero() || a.len > one {
                return Err(DynError::BadObservable("arc length outside (0,1]".into()));
            }
            total += &a.len;
            sorted.push(a.clone());
        }
        if total > one {
            return Err(DynError::BadObservable("total arc measure exceeds 1".into()));
        }
        sorted.sort_by(|a, b| a.start.cmp(&b.start));
        for w in sorted.windows(2) {
            if &w[0].start + &w[0].len > w[1].start {
                return Err(DynError::BadObservable("arcs overlap".into()));
            }
        }
        // Wrap-around overlap of the last arc into the first.
        if let (Some(first), Some(last)) = (sorted.first(), sorted.last()) {
            if sorted.len() > 1 {
                let end = &last.start + &last.len;
                if end > one && &end - &one > first.start {
                    return Err(DynError::BadObservable("arcs overlap around 0".into()));
                }
            }
        }
        Ok(sorted)
    }
}

/// Fractional part of an exact rational, in [0, 1).
fn frac_rational(v: &BigRational) -> BigRational {
    v - BigRational::from_integer(v.floor().to_integer())
}

/// Membership of an exactly-known circle position in half-open arcs.
fn arcs_contain_exact(arcs: &[Arc], t: &BigRational) -> bool {
    let one = BigRational::one();
    arcs.iter().any(|a| {
        let end = &a.start + &a.len;
        if end <= one {
            *t >= a.start && *t < end
        } else {
            // Wrapping arc [s, 1) ∪ [0, end - 1).
            *t >= a.start || *t < &end - &one
        }
    })
}

/// Certified membership of an interval-enclosed position: `Some(bool)` when
/// every point of `[lo, hi]` decides the same way, `None` otherwise.
fn arcs_contain_interval(arcs: &[Arc], lo: &BigRational, hi: &BigRational) -> Option<bool> {
    let one = BigRational::one();
    let mut inside_any = false;
    for a in arcs {
        let end = &a.start + &a.len;
        let segments: Vec<(BigRational, BigRational)> = if end <= one {
            vec![(a.start.clone(), end.clone())]
        } else {
            vec![
                (a.start.clone(), one.clone()),
                (BigRational::zero(), &end - &one),
            ]
        };
        for (s, e) in segments {
            if *lo >= s && *hi < e {
                inside_any = true;
            } else if !(*hi < s || *lo >= e) {
                // Straddles this arc's boundary.
                return None;
            }
        }
    }
    Some(inside_any)
}

/// Circle position `{x0 + a alpha}` to certified rational bounds at the
/// given precision; `None` when the enclosure straddles an integer.
fn circle_frac_interval(
    alpha_enc: &crate::interval::DyadicInterval,
    x0: &BigRational,
    a: i64,
    prec: u32,
) -> Option<(BigRational, BigRational)> {
    let pos = alpha_enc
        .mul_int(&BigInt::from(a))
        .add(&crate::interval::DyadicInterval::from_ratio(x0, prec));
    let lo = pos.lo_ratio();
    let hi = pos.hi_ratio();
    let fl = lo.floor();
    if hi.clone().floor() != fl || hi == &fl + BigRational::one() {
        return None;
    }
    Some((lo - fl.clone(), hi - fl))
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitAverageReport {
    pub average: f64,
    pub n: u64,
    pub hits: u64,
    /// Points that needed precision above the starting level.
    pub boundary_escalations: u64,
}

/// `(1/N) sum 1_obs(T^{a_n} x0)` with certified membership per term.
pub fn orbit_average(
    system: &RotationSystem,
    x0: &Point,
    obs: &Observable,
    values: &[i64],
    policy: &PrecisionPolicy,
) -> Result<OrbitAverageReport, DynError> {
    assert!(!values.is_empty());
    let mut escalations = 0u64;
    let mut hits = 0u64;
    let prepared = Prepared::build(system, x0, obs, policy)?;
    for (idx, &a) in values.iter().enumerate() {
        if prepared.member(a, idx, policy, &mut escalations)? {
            hits += 1;
        }
    }
    Ok(OrbitAverageReport {
        average: hits as f64 / values.len() as f64,
        n: values.len() as u64,
        hits,
        boundary_escalations: escalations,
    })
}

/// Pre-validated system + point + observable with cached enclosures.
enum Prepared {
    Circle {
        alpha: RealConstant,
        alpha_rational: Option<BigRational>,
        x0: BigRational,
        arcs: Vec<Arc>,
        /// (precision, enclosure) ladder, built on demand.
        enclosures: std::cell::RefCell<Vec<(u32, crate::interval::DyadicInterval)>>,
    },
    Cyclic {
        m: u64,
        x0: u64,
        residues: BTreeSet<u64>,
    },
    Product(Vec<Prepared>),
}

impl Prepared {
    fn build(
        system: &RotationSystem,
        x0: &Point,
        obs: &Observable,
        policy: &PrecisionPolicy,
    ) -> Result<Prepared, DynError> {
        match (system, x0, obs) {
            (RotationSystem::Circle { alpha }, Point::Circle(start), Observable::Arcs(arcs)) => {
                let arcs = Observable::validated_arcs(arcs)?;
                let enc = alpha.enclose(policy.start_bits);
                Ok(Prepared::Circle {
                    alpha: alpha.clone(),
                    alpha_rational: alpha.as_rational().cloned(),
                    x0: frac_rational(start),
                    arcs,
                    enclosures: std::cell::RefCell::new(vec![(policy.start_bits, enc)]),
                })
            }
            (RotationSystem::Cyclic { m }, Point::Cyclic(start), Observable::Residues(res)) => {
                if *m == 0 {
                    return Err(DynError::BadObservable("cyclic modulus must be >= 1".into()));
                }
                if res.iter().any(|&r| r >= *m) {
                    return Err(DynError::BadObservable("residue outside Z/mZ".into()));
                }
                Ok(Prepared::Cyclic {
                    m: *m,
                    x0: start % m,
                    residues: res.clone(),
                })
            }
            (RotationSystem::Product(systems), Point::Product(points), Observable::Product(obss)) => {
                if systems.len() != points.len() || systems.len() != obss.len() || systems.is_empty()
                {
                    return Err(DynError::ShapeMismatch);
                }
                let parts: Result<Vec<Prepared>, DynError> = systems
                    .iter()
                    .zip(points)
                    .zip(obss)
                    .map(|((s, p), o)| Prepared::build(s, p, o, policy))
                    .collect();
                Ok(Prepared::Product(parts?))
            }
            _ => Err(DynError::ShapeMismatch),
        }
    }

    fn member(
        &self,
        a: i64,
        index: usize,
        policy: &PrecisionPolicy,
        escalations: &mut u64,
    ) -> Result<bool, DynError> {
        match self {
            Prepared::Cyclic { m, x0, residues } => {
                let pos = (*x0 as i64 + a).rem_euclid(*m as i64) as u64;
                Ok(residues.contains(&pos))
            }
            Prepared::Circle {
                alpha_rational: Some(alpha),
                x0,
                arcs,
                ..
            } => {
                let t = frac_rational(&(x0 + alpha * BigRational::from_integer(BigInt::from(a))));
                Ok(arcs_contain_exact(arcs, &t))
            }
            Prepared::Circle {
                alpha,
                x0,
                arcs,
                enclosures,
                ..
            } => {
                // a = 0 keeps the point exactly rational.
                if a == 0 {
                    return Ok(arcs_contain_exact(arcs, &frac_rational(x0)));
                }
                let mut level = 0usize;
                loop {
                    let (prec, enc) = {
                        let mut ladder = enclosures.borrow_mut();
                        if level == ladder.len() {
                            let next_prec = (ladder[level - 1].0 * 2).min(policy.max_bits);
                            let enc = alpha.enclose(next_prec);
                            ladder.push((next_prec, enc));
                        }
                        ladder[level].clone()
                    };
                    if let Some((lo, hi)) = circle_frac_interval(&enc, x0, a, prec) {
                        if let Some(ans) = arcs_contain_interval(arcs, &lo, &hi) {
                            if level > 0 {
                                *escalations += 1;
                            }
                            return Ok(ans);
                        }
                    }
                    if prec >= policy.max_bits {
                        return Err(DynError::BoundaryAmbiguous { index });
                    }
                    level += 1;
                }
            }
            Prepared::Product(parts) => {
                for p in parts {
                    if !p.member(a, index, policy, escalations)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

/// Exact arc-overlap measure `mu(A ∩ T^theta A)` for `A = [0, beta)`:
/// `max(0, beta - t) + max(0, t + beta - 1)` with `t = {theta}`.
pub fn recurrence_term(beta: &BigRational, theta_frac: &BigRational) -> BigRational {
    let zero = BigRational::zero();
    let one = BigRational::one();
    debug_assert!(*theta_frac >= zero && *theta_frac < one);
    let a = (beta - theta_frac).max(zero.clone());
    let b = (theta_frac + beta - one).max(zero);
    a + b
}

fn recurrence_term_f64(beta: f64, t: f64) -> f64 {
    (beta - t).max(0.0) + (t + beta - 1.0).max(0.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceReport {
    pub average: f64,
    pub n: u64,
    pub beta: f64,
    pub beta_squared: f64,
    pub alpha: String,
}

/// `(1/N) sum mu(A ∩ T^{a_n} A)` on the circle with `A = [0, beta)`,
/// each term by the exact arc-overlap formula.
pub fn recurrence_average(
    alpha: &RealConstant,
    beta: &BigRational,
    values: &[i64],
) -> RecurrenceReport {
    assert!(!values.is_empty());
    assert!(
        *beta > BigRational::zero() && *beta <= BigRational::one(),
        "beta must lie in (0, 1]"
    );
    let b = beta.to_f64().unwrap();
    let fracs = frac_parts(values, alpha);
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for t in fracs {
        let y = recurrence_term_f64(b, t) - c;
        let s = sum + y;
        c = (s - sum) - y;
        sum = s;
    }
    RecurrenceReport {
        average: sum / values.len() as f64,
        n: values.len() as u64,
        beta: b,
        beta_squared: b * b,
        alpha: alpha.to_string(),
    }
}

/// One factor of a product recurrence average.
#[derive(Clone, Debug)]
pub enum RecurrenceFactor {
    Circle { alpha: RealConstant, beta: BigRational },
    Cyclic { m: u64, residues: BTreeSet<u64> },
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductRecurrenceReport {
    pub average: f64,
    pub n: u64,
    pub factors: Vec<String>,
    /// Product of the factor measures: mu(B)^2 analogue for the report.
    pub measure_product_squared: f64,
}

/// Term-wise product of factor recurrence measures, averaged over the
/// value sequence.
pub fn product_recurrence(factors: &[RecurrenceFactor], values: &[i64]) -> ProductRecurrenceReport {
    assert!(!factors.is_empty() && !values.is_empty());
    let mut per_factor: Vec<Vec<f64>> = Vec::with_capacity(factors.len());
    let mut names = Vec::with_capacity(factors.len());
    let mut measure_product = 1.0f64;
    for f in factors {
        match f {
            RecurrenceFactor::Circle { alpha, beta } => {
                let b = beta.to_f64().unwrap();
                measure_product *= b;
                let terms = frac_parts(values, alpha)
                    .into_iter()
                    .map(|t| recurrence_term_f64(b, t))
                    .collect();
                per_factor.push(terms);
                names.push(format!("circle:alpha={alpha},beta={b}"));
            }
            RecurrenceFactor::Cyclic { m, residues } => {
                measure_product *= residues.len() as f64 / *m as f64;
                // mu(A ∩ T^a A) = |A ∩ (A - a)| / m, exact per shift class.
                let mut by_class = vec![0.0f64; *m as usize];
                for (shift, slot) in by_class.iter_mut().enumerate() {
                    let count = residues
                        .iter()
                        .filter(|&&r| residues.contains(&((r + shift as u64) % m)))
                        .count();
                    *slot = count as f64 / *m as f64;
                }
                let terms = values
                    .iter()
                    .map(|&a| by_class[a.rem_euclid(*m as i64) as usize])
                    .collect();
                per_factor.push(terms);
                names.push(format!("cyclic:m={m},obs={residues:?}"));
            }
        }
    }
    let n = values.len();
    let mut sum = 0.0f64;
    for i in 0..n {
        let mut term = 1.0f64;
        for f in &per_factor {
            term *= f[i];
        }
        sum += term;
    }
    ProductRecurrenceReport {
        average: sum / n as f64,
        n: n as u64,
        factors: names,
        measure_product_squared: measure_product * measure_product,
    }
}
