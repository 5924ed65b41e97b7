//! Equidistribution probes: Weyl sums, residue histograms, star
//! discrepancy, and the finite-polynomial growth check.
//!
//! These are horizon-bounded numerical probes. They never claim a limit:
//! verdicts mean "consistent/violated at this horizon under the stated
//! thresholds".

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::collections::BTreeSet;

use crate::real::RealConstant;
use crate::seq::{PrecisionPolicy, SeqError, SequenceSpec};

/// Fixed-point bits used when reducing `lambda * a_n` mod 1. With |a_n|
/// below 2^63 this leaves ~250 certified bits, far beyond the 1e-9 target.
const FRAC_BITS: u32 = 320;

#[derive(Clone, Debug, Serialize)]
pub struct Checkpoint {
    pub m: u64,
    pub magnitude: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylSumReport {
    pub lambda: String,
    pub horizon: u64,
    pub magnitude: f64,
    /// `|S_M|` sampled at geometric checkpoints M.
    pub trajectory: Vec<Checkpoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueHistogram {
    pub modulus: u64,
    pub horizon: u64,
    pub counts: Vec<u64>,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Violated,
    Indeterminate,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylProbe {
    pub lambda: String,
    pub magnitude: f64,
    /// Magnitudes at the last three geometric checkpoints.
    pub tail: Vec<f64>,
    pub violated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueProbe {
    pub modulus: u64,
    pub max_deviation: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormErgodicVerdict {
    pub horizon: u64,
    pub irrational_probes: Vec<WeylProbe>,
    pub residue_probes: Vec<ResidueProbe>,
    pub verdict: Verdict,
    /// Set when the verdict is indeterminate.
    pub indeterminate_reason: Option<String>,
    pub note: &'static str,
}

/// Falsification thresholds for [`norm_ergodic_probe`].
#[derive(Clone, Debug, Serialize)]
pub struct ProbeThresholds {
    /// A probe is violated when `|S_M|` exceeds this at the last three
    /// geometric checkpoints.
    pub weyl_magnitude: f64,
    /// A residue probe is violated when `max_deviation` exceeds this.
    pub residue_deviation: f64,
}

impl Default for ProbeThresholds {
    fn default() -> Self {
        ProbeThresholds {
            weyl_magnitude: 0.5,
            residue_deviation: 0.1,
        }
    }
}

/// Default irrational probe frequencies: well-conditioned irrationals of
/// different diophantine type.
pub fn default_lambdas() -> Vec<RealConstant> {
    vec![
        RealConstant::sqrt2_minus_1(),
        RealConstant::golden(),
        RealConstant::pi_minus_3(),
    ]
}

/// Midpoint mantissa of `lambda` at `FRAC_BITS` fractional bits.
fn lambda_mantissa(lambda: &RealConstant) -> BigInt {
    let enc = lambda.enclose(FRAC_BITS);
    (enc.lo_mantissa() + enc.hi_mantissa()) / BigInt::from(2)
}

fn frac_f64(lam_m: &BigInt, a: i64) -> f64 {
    let modulus = BigInt::one() << FRAC_BITS;
    let p = lam_m * BigInt::from(a);
    let f = p.mod_floor(&modulus);
    let mag: BigUint = f.magnitude().clone();
    mag.to_f64().unwrap_or(0.0) * 2f64.powi(-(FRAC_BITS as i32))
}

/// Fractional parts `{lambda * a_n}` as f64, reduced in fixed point.
pub fn frac_parts(values: &[i64], lambda: &RealConstant) -> Vec<f64> {
    let lam_m = lambda_mantissa(lambda);
    values.iter().map(|&a| frac_f64(&lam_m, a)).collect()
}

fn geometric_checkpoints(n: u64) -> Vec<u64> {
    let mut cps = Vec::new();
    let mut m = 1u64;
    while m < n {
        cps.push(m);
        m *= 2;
    }
    cps.push(n);
    cps
}

/// `|1/N sum e^{2 pi i lambda a_n}|` with its checkpoint trajectory.
pub fn weyl_sum(values: &[i64], lambda: &RealConstant) -> WeylSumReport {
    assert!(!values.is_empty(), "weyl sum needs at least one value");
    let lam_m = lambda_mantissa(lambda);
    let checkpoints = geometric_checkpoints(values.len() as u64);
    let mut trajectory = Vec::with_capacity(checkpoints.len());
    let mut re = KahanSum::default();
    let mut im = KahanSum::default();
    let mut next_cp = 0usize;
    for (idx, &a) in values.iter().enumerate() {
        let theta = 2.0 * std::f64::consts::PI * frac_f64(&lam_m, a);
        re.add(theta.cos());
        im.add(theta.sin());
        let count = (idx + 1) as u64;
        if next_cp < checkpoints.len() && checkpoints[next_cp] == count {
            let mag = (re.value().powi(2) + im.value().powi(2)).sqrt() / count as f64;
            trajectory.push(Checkpoint {
                m: count,
                magnitude: mag,
            });
            next_cp += 1;
        }
    }
    let magnitude = trajectory.last().map(|c| c.magnitude).unwrap_or(0.0);
    WeylSumReport {
        lambda: lambda.to_string(),
        horizon: values.len() as u64,
        magnitude,
        trajectory,
    }
}

#[derive(Default)]
struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// Histogram of `a_n mod m`.
pub fn residue_distribution(values: &[i64], m: u64) -> ResidueHistogram {
    assert!(m >= 1, "modulus must be at least 1");
    let mut counts = vec![0u64; m as usize];
    for &a in values {
        counts[a.rem_euclid(m as i64) as usize] += 1;
    }
    let n = values.len() as f64;
    let max_deviation = counts
        .iter()
        .map(|&c| (c as f64 / n - 1.0 / m as f64).abs())
        .fold(0.0, f64::max);
    ResidueHistogram {
        modulus: m,
        horizon: values.len() as u64,
        counts,
        max_deviation,
    }
}

/// Exact star discrepancy of points in `[0,1)` via the sorted formula.
pub fn star_discrepancy(points: &[f64]) -> f64 {
    assert!(!points.is_empty(), "discrepancy needs at least one point");
    let mut xs = points.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("points must not be NaN"));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        debug_assert!((0.0..1.0).contains(&x));
        d = d.max((i as f64 + 1.0) / n - x).max(x - i as f64 / n);
    }
    d
}

/// Run Weyl and residue probes against the floors of a sequence spec.
pub fn norm_ergodic_probe(
    spec: &SequenceSpec,
    n: u64,
    lambdas: &[RealConstant],
    moduli: &[u64],
    thresholds: &ProbeThresholds,
    policy: &PrecisionPolicy,
) -> Result<NormErgodicVerdict, SeqError> {
    const NOTE: &str =
        "horizon-consistency probe: thresholds are tool parameters, not limit claims";
    let values = match spec.floor_values(n, policy) {
        Ok(v) => v,
        Err(SeqError::PrecisionExhausted { n: at, lo, hi }) => {
            return Ok(NormErgodicVerdict {
                horizon: n,
                irrational_probes: Vec::new(),
                residue_probes: Vec::new(),
                verdict: Verdict::Indeterminate,
                indeterminate_reason: Some(format!(
                    "floor at n={at} not certified within precision cap ([{lo}, {hi}])"
                )),
                note: NOTE,
            })
        }
        Err(e) => return Err(e),
    };
    let mut violated = false;
    let irrational_probes = lambdas
        .iter()
        .map(|lam| {
            let rep = weyl_sum(&values, lam);
            let tail: Vec<f64> = rep
                .trajectory
                .iter()
                .rev()
                .take(3)
                .rev()
                .map(|c| c.magnitude)
                .collect();
            let bad = tail.len() == 3 && tail.iter().all(|&m| m > thresholds.weyl_magnitude);
            violated |= bad;
            WeylProbe {
                lambda: rep.lambda,
                magnitude: rep.magnitude,
                tail,
                violated: bad,
            }
        })
        .collect();
    let residue_probes = moduli
        .iter()
        .map(|&m| {
            let rep = residue_distribution(&values, m);
            let bad = rep.max_deviation > thresholds.residue_deviation;
            violated |= bad;
            ResidueProbe {
                modulus: m,
                max_deviation: rep.max_deviation,
                violated: bad,
            }
        })
        .collect();
    Ok(NormErgodicVerdict {
        horizon: n,
        irrational_probes,
        residue_probes,
        verdict: if violated {
            Verdict::Violated
        } else {
            Verdict::Consistent
        },
        indeterminate_reason: None,
        note: NOTE,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PolyProbe {
    pub polynomial: String,
    pub ratios: Vec<f64>,
    pub diverges: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoshernitzanReport {
    pub degree_bound: u32,
    pub height_bound: u32,
    pub grid: Vec<u64>,
    pub polynomials: Vec<PolyProbe>,
    pub all_diverge: bool,
    pub note: &'static str,
}

/// All rationals `a/b` with `|a| <= h`, `1 <= b <= h`, gcd-reduced.
fn rational_heights(h: u32) -> Vec<BigRational> {
    let mut set = BTreeSet::new();
    for a in -(h as i64)..=h as i64 {
        for b in 1..=h as i64 {
            set.insert(BigRational::new(BigInt::from(a), BigInt::from(b)));
        }
    }
    set.into_iter().collect()
}

fn poly_to_string(coeffs: &[BigRational]) -> String {
    if coeffs.is_empty() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let coeff = if c.denom().is_one() {
            c.numer().to_string()
        } else {
            format!("{}/{}", c.numer(), c.denom())
        };
        let part = match i {
            0 => coeff,
            1 => format!("{coeff}*x"),
            _ => format!("{coeff}*x^{i}"),
        };
        parts.push(part);
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

/// Finite check of the ratio `(g(x) - p(x)) / ln x` over all rational
/// polynomials of bounded degree and height, on a geometric grid.
///
/// This enumerates finitely many polynomials and grid points for a
/// condition that quantifies over all of `Q[x]` and `x -> oo`; the report
/// is a heuristic trend, which is why each probe carries its trajectory.
pub fn boshernitzan_probe(
    spec: &SequenceSpec,
    degree_bound: u32,
    height_bound: u32,
    grid: &[u64],
    _policy: &PrecisionPolicy,
) -> Result<BoshernitzanReport, SeqError> {
    assert!(grid.iter().all(|&x| x >= 2), "grid points must be >= 2");
    let coeff_values = rational_heights(height_bound);
    let mut polys: BTreeSet<Vec<BigRational>> = BTreeSet::new();
    let mut stack: Vec<Vec<BigRational>> = vec![Vec::new()];
    for _ in 0..=degree_bound {
        let mut next = Vec::new();
        for partial in &stack {
            for c in &coeff_values {
                let mut p = partial.clone();
                p.push(c.clone());
                next.push(p);
            }
        }
        stack = next;
    }
    for mut p in stack {
        while p.last().map_or(false, |c| c.is_zero()) {
            p.pop();
        }
        polys.insert(p);
    }

    // g on the grid, midpoint values.
    let mut g_vals = Vec::with_capacity(grid.len());
    for &x in grid {
        g_vals.push(spec.eval_interval(x, 192)?.to_f64());
    }

    let mut reports = Vec::with_capacity(polys.len());
    let mut all_diverge = true;
    for coeffs in polys {
        let ratios: Vec<f64> = grid
            .iter()
            .zip(&g_vals)
            .map(|(&x, &g)| {
                let mut p = 0.0f64;
                for c in coeffs.iter().rev() {
                    p = p * x as f64 + c.to_f64().unwrap_or(f64::NAN);
                }
                (g - p) / (x as f64).ln()
            })
            .collect();
        let diverges = tail_diverges(&ratios);
        all_diverge &= diverges;
        reports.push(PolyProbe {
            polynomial: poly_to_string(&coeffs),
            ratios,
            diverges,
        });
    }
    Ok(BoshernitzanReport {
        degree_bound,
        height_bound,
        grid: grid.to_vec(),
        polynomials: reports,
        all_diverge,
        note: "finite enumeration of an infinite condition; trend only",
    })
}

/// Monotone divergence over the last three grid points.
fn tail_diverges(ratios: &[f64]) -> bool {
    const DIVERGE_MAGNITUDE: f64 = 2.0;
    if ratios.len() < 3 {
        return false;
    }
    let t = &ratios[ratios.len() - 3..];
    let a = t[0].abs();
    let b = t[1].abs();
    let c = t[2].abs();
    a < b && b < c && c > DIVERGE_MAGNITUDE
}

/// Geometric grid `10, 100, ..., <= max`, always including `max`.
pub fn default_grid(max: u64) -> Vec<u64> {
    let mut grid = Vec::new();
    let mut x = 10u64;
    while x < max {
        grid.push(x);
        match x.checked_mul(10) {
            Some(next) => x = next,
            None => break,
        }
    }
    grid.push(max.max(10));
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_integer_lambda_is_one() {
        let values: Vec<i64> = (1..=100).collect();
        let rep = weyl_sum(&values, &RealConstant::from_integer(1));
        assert!((rep.magnitude - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weyl_half_cancels() {
        let values: Vec<i64> = (1..=10).collect();
        let rep = weyl_sum(&values, &RealConstant::from_ratio(1, 2));
        assert!(rep.magnitude < 1e-12);
    }

    #[test]
    fn weyl_invariant_under_integer_shift_of_lambda() {
        let values: Vec<i64> = (1..=500).map(|n: i64| n * n % 1001).collect();
        for lam in [RealConstant::from_ratio(2, 7), RealConstant::sqrt2_minus_1()] {
            let shifted = match &lam {
                RealConstant::Rational(r) => {
                    RealConstant::Rational(r + BigRational::from_integer(BigInt::from(3)))
                }
                RealConstant::Sqrt { k, mul, add } => RealConstant::Sqrt {
                    k: *k,
                    mul: mul.clone(),
                    add: add + BigRational::from_integer(BigInt::from(3)),
                },
                _ => unreachable!(),
            };
            let a = weyl_sum(&values, &lam);
            let b = weyl_sum(&values, &shifted);
            assert!(
                (a.magnitude - b.magnitude).abs() < 1e-12,
                "lambda shift changed magnitude"
            );
        }
    }

    #[test]
    fn residue_examples() {
        let values: Vec<i64> = (1..=1000).collect();
        let rep = residue_distribution(&values, 4);
        assert_eq!(rep.counts, vec![250, 250, 250, 250]);
        assert!(rep.max_deviation < 1e-12);

        let evens: Vec<i64> = (1..=100).map(|n| 2 * n).collect();
        let rep2 = residue_distribution(&evens, 2);
        assert_eq!(rep2.counts, vec![100, 0]);
        assert!((rep2.max_deviation - 0.5).abs() < 1e-12);
    }

    #[test]
    fn residue_histogram_rotates_under_shift() {
        let values: Vec<i64> = (1..=377).map(|n: i64| n * n * n % 1000).collect();
        let m = 7u64;
        let base = residue_distribution(&values, m);
        let shifted_values: Vec<i64> = values.iter().map(|&v| v + 3).collect();
        let shifted = residue_distribution(&shifted_values, m);
        for j in 0..m as usize {
            assert_eq!(base.counts[j], shifted.counts[(j + 3) % m as usize]);
        }
    }

    #[test]
    fn star_discrepancy_examples() {
        assert!((star_discrepancy(&[0.0]) - 1.0).abs() < 1e-15);
        let equal: Vec<f64> = (0..10).map(|k| k as f64 / 10.0).collect();
        assert!((star_discrepancy(&equal) - 0.1).abs() < 1e-15);
        // First 100 golden-ratio multiples mod 1; value frozen from an
        // independent fixed-point computation.
        let values: Vec<i64> = (1..=100).collect();
        let phi = RealConstant::Sqrt {
            k: 5,
            mul: BigRational::new(BigInt::one(), BigInt::from(2)),
            add: BigRational::new(BigInt::one(), BigInt::from(2)),
        };
        let pts = frac_parts(&values, &phi);
        let d = star_discrepancy(&pts);
        assert!((d - 0.014175279993270284).abs() < 1e-9);
        assert!(d < 0.05);
    }

    #[test]
    fn star_discrepancy_lower_bound() {
        // Classical bound D*_N >= 1/(2N).
        for pts in [
            vec![0.5],
            vec![0.25, 0.75],
            (0..37).map(|k| (k as f64 + 0.5) / 37.0).collect::<Vec<_>>(),
        ] {
            let n = pts.len() as f64;
            assert!(star_discrepancy(&pts) >= 1.0 / (2.0 * n) - 1e-12);
        }
    }

    #[test]
    fn weyl_rational_lambda_matches_histogram_route() {
        // For lambda = j/m the Weyl sum is a function of the histogram.
        let spec = SequenceSpec::rational_power(3, 2).unwrap();
        let values = spec.floor_values(1000, &PrecisionPolicy::default()).unwrap();
        let (j, m) = (2i64, 5u64);
        let direct = weyl_sum(&values, &RealConstant::from_ratio(j, m as i64));
        let hist = residue_distribution(&values, m);
        let mut re = 0.0;
        let mut im = 0.0;
        for (r, &c) in hist.counts.iter().enumerate() {
            let theta = 2.0 * std::f64::consts::PI * (j as f64 * r as f64 / m as f64);
            re += c as f64 * theta.cos();
            im += c as f64 * theta.sin();
        }
        let n = values.len() as f64;
        let from_hist = (re * re + im * im).sqrt() / n;
        assert!((direct.magnitude - from_hist).abs() < 1e-9);
    }

    #[test]
    fn probe_flags_square_polynomial_mod_4() {
        // n^2 mod 4 only hits {0, 1}; the residue probe must fire.
        let spec = SequenceSpec::real_polynomial(vec![
            RealConstant::zero(),
            RealConstant::zero(),
            RealConstant::from_integer(1),
        ])
        .unwrap();
        let verdict = norm_ergodic_probe(
            &spec,
            10_000,
            &[],
            &[4],
            &ProbeThresholds::default(),
            &PrecisionPolicy::default(),
        )
        .unwrap();
        assert_eq!(verdict.verdict, Verdict::Violated);
        assert!(verdict.residue_probes[0].violated);
        assert!((verdict.residue_probes[0].max_deviation - 0.25).abs() < 1e-3);
    }

    #[test]
    fn probe_consistent_for_identity() {
        let spec = SequenceSpec::rational_power(1, 1).unwrap();
        let verdict = norm_ergodic_probe(
            &spec,
            2000,
            &default_lambdas(),
            &[2, 3, 4, 5],
            &ProbeThresholds::default(),
            &PrecisionPolicy::default(),
        )
        .unwrap();
        assert_eq!(verdict.verdict, Verdict::Consistent);
    }

    #[test]
    fn probe_indeterminate_on_precision_exhaustion() {
        let c = RealConstant::Approx {
            value: BigRational::from_integer(BigInt::from(2)),
            radius: BigRational::new(BigInt::one(), BigInt::from(1_000_000)),
        };
        let spec = SequenceSpec::real_power(c).unwrap();
        let verdict = norm_ergodic_probe(
            &spec,
            10,
            &[],
            &[2],
            &ProbeThresholds::default(),
            &PrecisionPolicy::with_max_bits(128),
        )
        .unwrap();
        assert_eq!(verdict.verdict, Verdict::Indeterminate);
        assert!(verdict.indeterminate_reason.is_some());
    }

    #[test]
    fn bosh_identity_fails_on_its_own_polynomial() {
        let spec = SequenceSpec::rational_power(1, 1).unwrap();
        let grid = default_grid(100_000);
        let rep =
            boshernitzan_probe(&spec, 1, 1, &grid, &PrecisionPolicy::default()).unwrap();
        assert!(!rep.all_diverge);
        let own = rep
            .polynomials
            .iter()
            .find(|p| p.polynomial == "1*x")
            .expect("p(x) = x enumerated");
        assert!(own.ratios.iter().all(|r| r.abs() < 1e-9));
        assert!(!own.diverges);
    }

    #[test]
    fn bosh_pow_three_halves_diverges_everywhere() {
        let spec = SequenceSpec::rational_power(3, 2).unwrap();
        let grid = default_grid(1_000_000);
        let rep =
            boshernitzan_probe(&spec, 1, 3, &grid, &PrecisionPolicy::default()).unwrap();
        assert_eq!(rep.polynomials.len(), 225);
        assert!(rep.all_diverge);
    }

    #[test]
    fn bosh_log_squared_diverges_against_constants() {
        let spec = SequenceSpec::log_power(RealConstant::from_integer(2)).unwrap();
        let grid = default_grid(1_000_000);
        let rep =
            boshernitzan_probe(&spec, 0, 1, &grid, &PrecisionPolicy::default()).unwrap();
        // ratio (log^2 x - c)/log x ~ log x for every constant c.
        assert!(rep.all_diverge);
    }
}
