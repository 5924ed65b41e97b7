//! CLI grammars for sequence specs, windowed sets, rotation systems,
//! observables, and recurrence factors.

use std::collections::BTreeSet;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ergolab_core::density::{Domain, WindowedSet};
use ergolab_core::dynamics::{Arc, Observable, Point, RecurrenceFactor, RotationSystem};
use ergolab_core::real::RealConstant;
use ergolab_core::seq::SequenceSpec;

pub type ParseResult<T> = Result<T, String>;

/// `pow:3/2`, `pow:sqrt2`, `affsqrt:2,2`, `nlogn`, `nsqoverlog`,
/// `logpow:2`, `poly:c0,c1,...` (constants in the RealConstant grammar).
pub fn seq_spec(s: &str) -> ParseResult<SequenceSpec> {
    let fail = |e: String| format!("bad sequence spec `{s}`: {e}");
    match s {
        "nlogn" => return Ok(SequenceSpec::NLogN),
        "nsqoverlog" => return Ok(SequenceSpec::NSqOverLog),
        _ => {}
    }
    if let Some(body) = s.strip_prefix("pow:") {
        let c: RealConstant = body.parse().map_err(|e| fail(format!("{e}")))?;
        return SequenceSpec::real_power(c).map_err(|e| fail(e.to_string()));
    }
    if let Some(body) = s.strip_prefix("affsqrt:") {
        let (a, b) = body
            .split_once(',')
            .ok_or_else(|| fail("expected `a,b`".into()))?;
        let a = a.trim().parse::<u64>().map_err(|e| fail(e.to_string()))?;
        let b = b.trim().parse::<u64>().map_err(|e| fail(e.to_string()))?;
        return SequenceSpec::affine_sqrt(a, b).map_err(|e| fail(e.to_string()));
    }
    if let Some(body) = s.strip_prefix("logpow:") {
        let t: RealConstant = body.parse().map_err(|e| fail(format!("{e}")))?;
        return SequenceSpec::log_power(t).map_err(|e| fail(e.to_string()));
    }
    if let Some(body) = s.strip_prefix("poly:") {
        let coeffs: Result<Vec<RealConstant>, _> =
            body.split(',').map(|c| c.trim().parse()).collect();
        let coeffs = coeffs.map_err(|e| fail(format!("{e}")))?;
        return SequenceSpec::real_polynomial(coeffs).map_err(|e| fail(e.to_string()));
    }
    Err(fail("unknown spec family".into()))
}

pub fn rational(s: &str) -> ParseResult<BigRational> {
    let c: RealConstant = s
        .parse()
        .map_err(|e| format!("bad rational `{s}`: {e}"))?;
    c.as_rational()
        .cloned()
        .ok_or_else(|| format!("`{s}` is not rational"))
}

/// `mult:4`, `squares`, `all`, `list:1,2,4`, `random:0.3` (uses the run
/// seed), `file:PATH` (one integer per line).
pub fn windowed_set(
    s: &str,
    domain: Domain,
    horizon: u64,
    seed: u64,
) -> ParseResult<WindowedSet> {
    if let Some(k) = s.strip_prefix("mult:") {
        let k = k.parse::<u64>().map_err(|e| e.to_string())?;
        if k == 0 {
            return Err("multiples of 0 are not a set of naturals".into());
        }
        return Ok(WindowedSet::multiples(domain, horizon, k));
    }
    if s == "squares" {
        if domain != Domain::Nat {
            return Err("squares is an N-window set".into());
        }
        return Ok(WindowedSet::squares(horizon));
    }
    if s == "all" {
        return Ok(WindowedSet::full(domain, horizon));
    }
    if let Some(body) = s.strip_prefix("list:") {
        let members: Result<Vec<i64>, _> = body.split(',').map(|v| v.trim().parse()).collect();
        return Ok(WindowedSet::from_members(
            domain,
            horizon,
            members.map_err(|e: std::num::ParseIntError| e.to_string())?,
        ));
    }
    if let Some(p) = s.strip_prefix("random:") {
        let density: f64 = p.parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
        if !(0.0..=1.0).contains(&density) {
            return Err("random density must lie in [0,1]".into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let range: Vec<i64> = match domain {
            Domain::Nat => (1..=horizon as i64).collect(),
            Domain::Int => (-(horizon as i64)..=horizon as i64).collect(),
        };
        let members = range.into_iter().filter(|_| rng.gen_bool(density));
        return Ok(WindowedSet::from_members(domain, horizon, members));
    }
    if let Some(path) = s.strip_prefix("file:") {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        return WindowedSet::from_lines(domain, horizon, &text);
    }
    Err(format!("unknown set descriptor `{s}`"))
}

pub fn domain(s: &str) -> ParseResult<Domain> {
    match s {
        "N" | "n" | "nat" => Ok(Domain::Nat),
        "Z" | "z" | "int" => Ok(Domain::Int),
        _ => Err(format!("unknown domain `{s}` (expected N or Z)")),
    }
}

fn residue_set(s: &str) -> ParseResult<BTreeSet<u64>> {
    s.split(',')
        .map(|v| v.trim().parse::<u64>().map_err(|e| e.to_string()))
        .collect()
}

/// One system factor: `circle:alpha=sqrt2-1` or `cyclic:m=4`; product
/// factors joined by `|`.
pub fn rotation_system(s: &str) -> ParseResult<RotationSystem> {
    let factors: Vec<&str> = s.split('|').collect();
    let parse_one = |f: &str| -> ParseResult<RotationSystem> {
        if let Some(body) = f.strip_prefix("circle:alpha=") {
            let alpha: RealConstant = body
                .parse()
                .map_err(|e| format!("bad alpha in `{f}`: {e}"))?;
            return Ok(RotationSystem::Circle { alpha });
        }
        if let Some(body) = f.strip_prefix("cyclic:m=") {
            let m = body.parse::<u64>().map_err(|e| e.to_string())?;
            return Ok(RotationSystem::Cyclic { m });
        }
        Err(format!("unknown system `{f}`"))
    };
    if factors.len() == 1 {
        parse_one(factors[0])
    } else {
        Ok(RotationSystem::Product(
            factors.iter().map(|f| parse_one(f)).collect::<ParseResult<_>>()?,
        ))
    }
}

/// `arc:0,0.5`, `arcs:0,0.25;0.5,0.25`, or `res:0,2`; product components
/// joined by `|` in system order.
pub fn observable(s: &str) -> ParseResult<Observable> {
    let parts: Vec<&str> = s.split('|').collect();
    let parse_one = |f: &str| -> ParseResult<Observable> {
        if let Some(body) = f.strip_prefix("arc:") {
            let (start, len) = body
                .split_once(',')
                .ok_or_else(|| format!("expected `start,len` in `{f}`"))?;
            return Ok(Observable::Arcs(vec![Arc {
                start: rational(start)?,
                len: rational(len)?,
            }]));
        }
        if let Some(body) = f.strip_prefix("arcs:") {
            let arcs: ParseResult<Vec<Arc>> = body
                .split(';')
                .map(|pair| {
                    let (start, len) = pair
                        .split_once(',')
                        .ok_or_else(|| format!("expected `start,len` in `{pair}`"))?;
                    Ok(Arc {
                        start: rational(start)?,
                        len: rational(len)?,
                    })
                })
                .collect();
            return Ok(Observable::Arcs(arcs?));
        }
        if let Some(body) = f.strip_prefix("res:") {
            return Ok(Observable::Residues(residue_set(body)?));
        }
        Err(format!("unknown observable `{f}`"))
    };
    if parts.len() == 1 {
        parse_one(parts[0])
    } else {
        Ok(Observable::Product(
            parts.iter().map(|f| parse_one(f)).collect::<ParseResult<_>>()?,
        ))
    }
}

/// Start point: rational for circle factors, integer for cyclic, joined
/// by `|` for products.
pub fn start_point(s: &str, system: &RotationSystem) -> ParseResult<Point> {
    match system {
        RotationSystem::Circle { .. } => Ok(Point::Circle(rational(s)?)),
        RotationSystem::Cyclic { .. } => {
            Ok(Point::Cyclic(s.parse::<u64>().map_err(|e| e.to_string())?))
        }
        RotationSystem::Product(factors) => {
            let parts: Vec<&str> = s.split('|').collect();
            if parts.len() != factors.len() {
                return Err(format!(
                    "start point has {} components, system has {}",
                    parts.len(),
                    factors.len()
                ));
            }
            Ok(Point::Product(
                parts
                    .iter()
                    .zip(factors)
                    .map(|(p, f)| start_point(p, f))
                    .collect::<ParseResult<_>>()?,
            ))
        }
    }
}

/// Product-recurrence factors: `circle:alpha=sqrt2-1,beta=0.3` or
/// `cyclic:m=4,res=0,1`, joined by `|`.
pub fn recurrence_factors(s: &str) -> ParseResult<Vec<RecurrenceFactor>> {
    s.split('|')
        .map(|f| {
            if let Some(body) = f.strip_prefix("circle:") {
                let mut alpha = None;
                let mut beta = None;
                for part in body.split(',') {
                    if let Some(v) = part.strip_prefix("alpha=") {
                        alpha = Some(v.parse::<RealConstant>().map_err(|e| format!("{e}"))?);
                    } else if let Some(v) = part.strip_prefix("beta=") {
                        beta = Some(rational(v)?);
                    } else {
                        return Err(format!("unknown circle field `{part}`"));
                    }
                }
                return Ok(RecurrenceFactor::Circle {
                    alpha: alpha.ok_or("circle factor needs alpha")?,
                    beta: beta.ok_or("circle factor needs beta")?,
                });
            }
            if let Some(body) = f.strip_prefix("cyclic:") {
                let (m_part, res_part) = body
                    .split_once(",res=")
                    .ok_or_else(|| format!("cyclic factor `{f}` needs `m=..,res=..`"))?;
                let m = m_part
                    .strip_prefix("m=")
                    .ok_or("cyclic factor needs m=")?
                    .parse::<u64>()
                    .map_err(|e| e.to_string())?;
                return Ok(RecurrenceFactor::Cyclic {
                    m,
                    residues: residue_set(res_part)?,
                });
            }
            Err(format!("unknown recurrence factor `{f}`"))
        })
        .collect()
}

pub fn u64_list(s: &str) -> ParseResult<Vec<u64>> {
    s.split(',')
        .map(|v| v.trim().parse::<u64>().map_err(|e| e.to_string()))
        .collect()
}

pub fn lambda_list(s: &str) -> ParseResult<Vec<RealConstant>> {
    s.split(',')
        .map(|v| v.trim().parse::<RealConstant>().map_err(|e| format!("{e}")))
        .collect()
}
