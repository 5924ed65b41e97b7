//! `ergolab` — command-line driver exposing every library operation with
//! reproducible, machine-readable output.
//!
//! Every successful run prints a single JSON document to stdout carrying
//! the tool version and the fully resolved configuration, so identical
//! invocations are byte-identical. Exit codes: 0 success, 2 indeterminate
//! (precision or search budget exhausted), 1 usage or internal error.

mod parse;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use ergolab_core::density::{
    self, cover_search, delta1, gap_run_stats, intersection_density, windowed_density,
    DensityError, Domain,
};
use ergolab_core::dynamics::{self, DynError};
use ergolab_core::equidist::{self, ProbeThresholds};
use ergolab_core::folner::{self, FolnerError, FolnerFamily, Mode};
use ergolab_core::real::RealConstant;
use ergolab_core::semigroup::Element;
use ergolab_core::seq::{PrecisionPolicy, SeqError};

const ENV_PRECISION: &str = "ERGOLAB_PRECISION_BITS";

#[derive(Parser)]
#[command(
    name = "ergolab",
    version,
    about = "Exact integer-part sequences, equidistribution probes, difference-set \
             densities, Følner temperedness ratios, and rotation-system averages",
    arg_required_else_help = true
)]
struct Cli {
    /// Report format; csv is available for tabular reports only.
    #[arg(long, global = true, default_value = "json", value_parser = ["json", "csv"])]
    output: String,

    /// Interval-arithmetic precision cap in fractional bits
    /// (default 4096, or the ERGOLAB_PRECISION_BITS environment variable).
    #[arg(long, global = true)]
    precision_bits: Option<u32>,

    /// Positivity threshold for windowed Delta_2 membership.
    #[arg(long, global = true, default_value_t = 1e-3)]
    theta: f64,

    /// Cap on pairwise operations in set enumerations.
    #[arg(long, global = true, default_value_t = 100_000_000)]
    cap: u64,

    /// Seed for randomized set descriptors (`random:p`).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Weyl sum |1/N sum e^{2 pi i lambda [g(n)]}| with its trajectory.
    Weyl {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        lambda: String,
        #[arg(long = "N")]
        n: u64,
    },
    /// Residue histograms of [g(n)] mod m.
    Residues {
        #[arg(long)]
        seq: String,
        /// Comma-separated moduli.
        #[arg(long)]
        m: String,
        #[arg(long = "N")]
        n: u64,
    },
    /// Norm-ergodicity probe: Weyl sums plus residue equidistribution.
    Probe {
        #[arg(long)]
        seq: String,
        #[arg(long = "N")]
        n: u64,
        /// Comma-separated irrational frequencies (default sqrt2-1,golden,pi-3).
        #[arg(long)]
        lambdas: Option<String>,
        /// Comma-separated moduli (default 2,3,4,5).
        #[arg(long)]
        moduli: Option<String>,
        #[arg(long, default_value_t = 0.5)]
        weyl_threshold: f64,
        #[arg(long, default_value_t = 0.1)]
        residue_threshold: f64,
    },
    /// Growth of (g(x) - p(x)) / ln x over bounded rational polynomials.
    Bosh {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        degree: u32,
        #[arg(long)]
        height: u32,
        #[arg(long, default_value_t = 1_000_000)]
        grid_max: u64,
    },
    /// Windowed density of a set along a Følner family.
    Density {
        #[arg(long)]
        set: String,
        #[arg(long, default_value = "N")]
        domain: String,
        #[arg(long)]
        horizon: u64,
        #[arg(long, default_value = "interval:a=1,b=n")]
        family: String,
        #[arg(long)]
        n_max: u64,
        /// Intersect with S - s for each comma-separated shift first.
        #[arg(long)]
        shifts: Option<String>,
    },
    /// Difference sets: kind 1 (realized differences), 2 (density above
    /// theta along shifts [g(n)]), 3 (exact intersection count).
    Delta {
        #[arg(long)]
        kind: u8,
        #[arg(long)]
        set: String,
        #[arg(long, default_value = "N")]
        domain: String,
        #[arg(long)]
        horizon: u64,
        /// kind 2: shift sequence g.
        #[arg(long)]
        seq: Option<String>,
        /// kind 2: range of n to test.
        #[arg(long)]
        n_range: Option<u64>,
        /// kind 2: family depth for the windowed density.
        #[arg(long)]
        family_n_max: Option<u64>,
        /// kind 3: the single shift to count.
        #[arg(long)]
        shift: Option<u64>,
    },
    /// Gap and run statistics of a windowed set.
    Gaps {
        #[arg(long)]
        set: String,
        #[arg(long, default_value = "N")]
        domain: String,
        #[arg(long)]
        horizon: u64,
    },
    /// Minimal translate cover of [-target, target] by copies of a Z-set.
    Cover {
        #[arg(long)]
        set: String,
        #[arg(long)]
        horizon: u64,
        #[arg(long)]
        target: u64,
        #[arg(long, default_value_t = 16)]
        l_max: usize,
    },
    /// Exhaustive adjacent-membership check for D_g, g = 2n + 2 sqrt(n).
    #[command(name = "example-3-13")]
    Example313 {
        #[arg(long)]
        horizon: u64,
    },
    /// Least M starting run_length+1 consecutive non-members of D_{3/2}.
    #[command(name = "example-3-14")]
    Example314 {
        #[arg(long)]
        run_length: u64,
        #[arg(long, default_value_t = 10_000_000)]
        bound: u64,
    },
    /// Følner defect |F_n ∩ g F_n| / |F_n|.
    Defect {
        #[arg(long)]
        family: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        n: u64,
    },
    /// Temperedness ratio scan against a candidate constant.
    Tempered {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n_max: u64,
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        #[arg(long, default_value = "group", value_parser = ["group", "semigroup"])]
        mode: String,
        /// Semicolon-separated translates for semigroup mode.
        #[arg(long)]
        g: Option<String>,
    },
    /// Boundedness criterion sequence n f(n) / f(n+1).
    #[command(name = "criterion-5-3")]
    Criterion53 {
        /// `n^k`, `n^n`, or a constant.
        #[arg(long)]
        f: String,
        #[arg(long)]
        n_max: u64,
    },
    /// Exact Heisenberg-box quotient count with its closed bound.
    HeisCount {
        #[arg(long)]
        n: u64,
    },
    /// Pointwise average (1/N) sum 1_obs(T^{[g(n)]} x0).
    ErgodicAvg {
        #[arg(long)]
        system: String,
        #[arg(long)]
        obs: String,
        #[arg(long)]
        seq: String,
        #[arg(long = "N")]
        n: u64,
        #[arg(long, default_value = "0")]
        x0: String,
    },
    /// Recurrence average (1/N) sum mu(A ∩ T^{[g(n)]} A).
    Recurrence {
        #[arg(long)]
        seq: String,
        #[arg(long = "N")]
        n: u64,
        /// Single circle factor: rotation angle.
        #[arg(long)]
        alpha: Option<String>,
        /// Single circle factor: arc measure.
        #[arg(long)]
        beta: Option<String>,
        /// Product form: `circle:alpha=..,beta=..|cyclic:m=..,res=..`.
        #[arg(long)]
        product: Option<String>,
    },
}

/// Failures that mean "the budget ran out", not "you asked wrong".
enum Failure {
    Indeterminate(String),
    Usage(String),
}

impl From<SeqError> for Failure {
    fn from(e: SeqError) -> Self {
        match e {
            SeqError::PrecisionExhausted { .. } => Failure::Indeterminate(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<FolnerError> for Failure {
    fn from(e: FolnerError) -> Self {
        match e {
            FolnerError::EnumerationTooLarge { .. } => Failure::Indeterminate(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<DensityError> for Failure {
    fn from(e: DensityError) -> Self {
        match e {
            DensityError::CoverFailure { .. } => Failure::Indeterminate(e.to_string()),
            DensityError::Seq(inner) => inner.into(),
            DensityError::Folner(inner) => inner.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<DynError> for Failure {
    fn from(e: DynError) -> Self {
        match e {
            DynError::BoundaryAmbiguous { .. } => Failure::Indeterminate(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(msg: String) -> Self {
        Failure::Usage(msg)
    }
}

struct Emitted {
    report: Value,
    csv: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    if let Err(msg) = validate_globals(&cli) {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    let command = command_name(&cli.command);
    let config = resolved_config(&cli);
    match run(&cli) {
        Ok(emitted) => {
            if cli.output == "csv" {
                match emitted.csv {
                    Some(csv) => {
                        print!("{csv}");
                        ExitCode::SUCCESS
                    }
                    None => {
                        eprintln!("error: csv output is not available for `{command}`");
                        ExitCode::from(1)
                    }
                }
            } else {
                print_envelope(command, &config, "ok", emitted.report);
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Indeterminate(reason)) => {
            print_envelope(command, &config, "indeterminate", json!({ "reason": reason }));
            ExitCode::from(2)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn print_envelope(command: &str, config: &Value, status: &str, report: Value) {
    let envelope = json!({
        "tool": "ergolab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "status": status,
        "config": config,
        "report": report,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&envelope).expect("reports serialize")
    );
}

fn validate_globals(cli: &Cli) -> Result<(), String> {
    if !(cli.theta > 0.0) {
        return Err("--theta must be positive".into());
    }
    if cli.cap == 0 {
        return Err("--cap must be positive".into());
    }
    if let Some(bits) = cli.precision_bits {
        if bits < 16 {
            return Err("--precision-bits must be at least 16".into());
        }
    }
    Ok(())
}

fn policy(cli: &Cli) -> PrecisionPolicy {
    let cap = cli
        .precision_bits
        .or_else(|| {
            std::env::var(ENV_PRECISION)
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(4096);
    PrecisionPolicy {
        start_bits: 64.min(cap),
        max_bits: cap,
        frac_tolerance_bits: 32.min(cap),
    }
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Weyl { .. } => "weyl",
        Cmd::Residues { .. } => "residues",
        Cmd::Probe { .. } => "probe",
        Cmd::Bosh { .. } => "bosh",
        Cmd::Density { .. } => "density",
        Cmd::Delta { .. } => "delta",
        Cmd::Gaps { .. } => "gaps",
        Cmd::Cover { .. } => "cover",
        Cmd::Example313 { .. } => "example-3-13",
        Cmd::Example314 { .. } => "example-3-14",
        Cmd::Defect { .. } => "defect",
        Cmd::Tempered { .. } => "tempered",
        Cmd::Criterion53 { .. } => "criterion-5-3",
        Cmd::HeisCount { .. } => "heis-count",
        Cmd::ErgodicAvg { .. } => "ergodic-avg",
        Cmd::Recurrence { .. } => "recurrence",
    }
}

/// Full resolved configuration, echoed into every report for auditability.
fn resolved_config(cli: &Cli) -> Value {
    let pol = policy(cli);
    let mut config = json!({
        "output": cli.output,
        "precision_bits": pol.max_bits,
        "theta": cli.theta,
        "cap": cli.cap,
        "seed": cli.seed,
    });
    let extra = match &cli.command {
        Cmd::Weyl { seq, lambda, n } => json!({"seq": seq, "lambda": lambda, "N": n}),
        Cmd::Residues { seq, m, n } => json!({"seq": seq, "m": m, "N": n}),
        Cmd::Probe {
            seq,
            n,
            lambdas,
            moduli,
            weyl_threshold,
            residue_threshold,
        } => json!({
            "seq": seq,
            "N": n,
            "lambdas": lambdas.clone().unwrap_or_else(|| "sqrt2-1,golden,pi-3".into()),
            "moduli": moduli.clone().unwrap_or_else(|| "2,3,4,5".into()),
            "weyl_threshold": weyl_threshold,
            "residue_threshold": residue_threshold,
        }),
        Cmd::Bosh {
            seq,
            degree,
            height,
            grid_max,
        } => json!({"seq": seq, "degree": degree, "height": height, "grid_max": grid_max}),
        Cmd::Density {
            set,
            domain,
            horizon,
            family,
            n_max,
            shifts,
        } => json!({
            "set": set, "domain": domain, "horizon": horizon,
            "family": family, "n_max": n_max, "shifts": shifts,
        }),
        Cmd::Delta {
            kind,
            set,
            domain,
            horizon,
            seq,
            n_range,
            family_n_max,
            shift,
        } => json!({
            "kind": kind, "set": set, "domain": domain, "horizon": horizon,
            "seq": seq, "n_range": n_range, "family_n_max": family_n_max, "shift": shift,
        }),
        Cmd::Gaps {
            set,
            domain,
            horizon,
        } => json!({"set": set, "domain": domain, "horizon": horizon}),
        Cmd::Cover {
            set,
            horizon,
            target,
            l_max,
        } => json!({"set": set, "horizon": horizon, "target": target, "l_max": l_max}),
        Cmd::Example313 { horizon } => json!({"horizon": horizon}),
        Cmd::Example314 { run_length, bound } => {
            json!({"run_length": run_length, "bound": bound})
        }
        Cmd::Defect { family, g, n } => json!({"family": family, "g": g, "n": n}),
        Cmd::Tempered {
            family,
            n_max,
            c,
            mode,
            g,
        } => json!({"family": family, "n_max": n_max, "c": c, "mode": mode, "g": g}),
        Cmd::Criterion53 { f, n_max } => json!({"f": f, "n_max": n_max}),
        Cmd::HeisCount { n } => json!({"n": n}),
        Cmd::ErgodicAvg {
            system,
            obs,
            seq,
            n,
            x0,
        } => json!({"system": system, "obs": obs, "seq": seq, "N": n, "x0": x0}),
        Cmd::Recurrence {
            seq,
            n,
            alpha,
            beta,
            product,
        } => json!({"seq": seq, "N": n, "alpha": alpha, "beta": beta, "product": product}),
    };
    if let (Value::Object(base), Value::Object(extra)) = (&mut config, extra) {
        base.extend(extra);
    }
    config
}

fn to_value(v: impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn run(cli: &Cli) -> Result<Emitted, Failure> {
    let pol = policy(cli);
    match &cli.command {
        Cmd::Weyl { seq, lambda, n } => {
            require_positive(*n, "--N")?;
            let spec = parse::seq_spec(seq)?;
            let lam: RealConstant = lambda
                .parse()
                .map_err(|e| Failure::Usage(format!("{e}")))?;
            let values = spec.floor_values(*n, &pol)?;
            let report = equidist::weyl_sum(&values, &lam);
            Ok(Emitted {
                report: to_value(report),
                csv: None,
            })
        }
        Cmd::Residues { seq, m, n } => {
            require_positive(*n, "--N")?;
            let spec = parse::seq_spec(seq)?;
            let moduli = parse::u64_list(m)?;
            if moduli.iter().any(|&m| m == 0) {
                return Err(Failure::Usage("moduli must be positive".into()));
            }
            let values = spec.floor_values(*n, &pol)?;
            let reports: Vec<_> = moduli
                .iter()
                .map(|&m| equidist::residue_distribution(&values, m))
                .collect();
            let mut csv = String::from("modulus,residue,count,max_deviation\n");
            for rep in &reports {
                for (j, c) in rep.counts.iter().enumerate() {
                    csv.push_str(&format!(
                        "{},{},{},{}\n",
                        rep.modulus, j, c, rep.max_deviation
                    ));
                }
            }
            Ok(Emitted {
                report: to_value(reports),
                csv: Some(csv),
            })
        }
        Cmd::Probe {
            seq,
            n,
            lambdas,
            moduli,
            weyl_threshold,
            residue_threshold,
        } => {
            require_positive(*n, "--N")?;
            let spec = parse::seq_spec(seq)?;
            let lambdas = match lambdas {
                Some(s) => parse::lambda_list(s)?,
                None => equidist::default_lambdas(),
            };
            let moduli = match moduli {
                Some(s) => parse::u64_list(s)?,
                None => vec![2, 3, 4, 5],
            };
            let thresholds = ProbeThresholds {
                weyl_magnitude: *weyl_threshold,
                residue_deviation: *residue_threshold,
            };
            let verdict =
                equidist::norm_ergodic_probe(&spec, *n, &lambdas, &moduli, &thresholds, &pol)?;
            if verdict.verdict == equidist::Verdict::Indeterminate {
                let reason = verdict
                    .indeterminate_reason
                    .clone()
                    .unwrap_or_else(|| "undetermined floors".into());
                return Err(Failure::Indeterminate(reason));
            }
            Ok(Emitted {
                report: to_value(verdict),
                csv: None,
            })
        }
        Cmd::Bosh {
            seq,
            degree,
            height,
            grid_max,
        } => {
            if *height == 0 {
                return Err(Failure::Usage("--height must be positive".into()));
            }
            let spec = parse::seq_spec(seq)?;
            let grid = equidist::default_grid(*grid_max);
            let report = equidist::boshernitzan_probe(&spec, *degree, *height, &grid, &pol)?;
            Ok(Emitted {
                report: to_value(report),
                csv: None,
            })
        }
        Cmd::Density {
            set,
            domain,
            horizon,
            family,
            n_max,
            shifts,
        } => {
            require_positive(*horizon, "--horizon")?;
            require_positive(*n_max, "--n-max")?;
            let dom = parse::domain(domain)?;
            let s = parse::windowed_set(set, dom, *horizon, cli.seed)?;
            let fam: FolnerFamily = family.parse().map_err(|e: FolnerError| Failure::from(e))?;
            let estimate = match shifts {
                Some(list) => {
                    let shifts = parse::u64_list(list)?;
                    intersection_density(&s, &shifts, &fam, *n_max)?
                }
                None => windowed_density(&s, &fam, *n_max)?,
            };
            let points: Vec<Value> = estimate
                .indices
                .iter()
                .zip(&estimate.ratios)
                .map(|(n, r)| {
                    json!({
                        "n": n,
                        "ratio": format!("{}/{}", r.numer(), r.denom()),
                        "approx": folner::ratio_to_f64(r),
                    })
                })
                .collect();
            let mut csv = String::from("n,ratio,approx\n");
            for (n, r) in estimate.indices.iter().zip(&estimate.ratios) {
                csv.push_str(&format!(
                    "{},{}/{},{}\n",
                    n,
                    r.numer(),
                    r.denom(),
                    folner::ratio_to_f64(r)
                ));
            }
            let report = json!({
                "points": points,
                "running_max_tail": folner::ratio_to_f64(&estimate.running_max_tail),
                "running_min_tail": folner::ratio_to_f64(&estimate.running_min_tail),
                "note": "finite-window ratios; no limit claim",
            });
            Ok(Emitted {
                report,
                csv: Some(csv),
            })
        }
        Cmd::Delta {
            kind,
            set,
            domain,
            horizon,
            seq,
            n_range,
            family_n_max,
            shift,
        } => {
            require_positive(*horizon, "--horizon")?;
            let dom = parse::domain(domain)?;
            let s = parse::windowed_set(set, dom, *horizon, cli.seed)?;
            match kind {
                1 => {
                    let d = delta1(&s);
                    Ok(Emitted {
                        report: json!({
                            "delta1": to_value(&d),
                            "count": d.count(),
                        }),
                        csv: None,
                    })
                }
                2 => {
                    let spec = parse::seq_spec(
                        seq.as_deref()
                            .ok_or(Failure::Usage("kind 2 needs --seq".into()))?,
                    )?;
                    let n_range =
                        n_range.ok_or(Failure::Usage("kind 2 needs --n-range".into()))?;
                    let fam_n = family_n_max
                        .ok_or(Failure::Usage("kind 2 needs --family-n-max".into()))?;
                    let family = FolnerFamily::Interval {
                        a: folner::IntPoly::constant(1),
                        b: "n".parse().map_err(|e: FolnerError| Failure::from(e))?,
                    };
                    let d = density::delta2_g(&s, &spec, &family, n_range, fam_n, cli.theta, &pol)?;
                    Ok(Emitted {
                        report: json!({
                            "delta2": to_value(&d),
                            "count": d.count(),
                            "theta": cli.theta,
                            "note": "threshold surrogate for positive upper density on a window",
                        }),
                        csv: None,
                    })
                }
                3 => {
                    let k = shift.ok_or(Failure::Usage("kind 3 needs --shift".into()))?;
                    Ok(Emitted {
                        report: json!({"shift": k, "count": s.delta3_count(k)}),
                        csv: None,
                    })
                }
                other => Err(Failure::Usage(format!("unknown delta kind {other}"))),
            }
        }
        Cmd::Gaps {
            set,
            domain,
            horizon,
        } => {
            require_positive(*horizon, "--horizon")?;
            let dom = parse::domain(domain)?;
            let s = parse::windowed_set(set, dom, *horizon, cli.seed)?;
            let stats = gap_run_stats(&s);
            let mut csv = String::from("gap,count,first_left_member\n");
            for (gap, count) in &stats.gap_histogram {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    gap, count, stats.first_gap_of_length[gap]
                ));
            }
            Ok(Emitted {
                report: to_value(stats),
                csv: Some(csv),
            })
        }
        Cmd::Cover {
            set,
            horizon,
            target,
            l_max,
        } => {
            require_positive(*horizon, "--horizon")?;
            let s = parse::windowed_set(set, Domain::Int, *horizon, cli.seed)?;
            let cert = cover_search(&s, *target, *l_max)?;
            Ok(Emitted {
                report: to_value(cert),
                csv: None,
            })
        }
        Cmd::Example313 { horizon } => {
            require_positive(*horizon, "--horizon")?;
            let start = std::time::Instant::now();
            let violations = density::verify_example_3_13(*horizon);
            eprintln!(
                "scanned {} values in {} ms",
                horizon,
                start.elapsed().as_millis()
            );
            Ok(Emitted {
                report: json!({
                    "horizon": horizon,
                    "violations": violations.len(),
                    "violation_positions": violations,
                }),
                csv: None,
            })
        }
        Cmd::Example314 { run_length, bound } => {
            require_positive(*bound, "--bound")?;
            let start = std::time::Instant::now();
            let found = density::find_gap_3_14(*run_length, *bound);
            eprintln!(
                "scanned up to {} in {} ms",
                bound,
                start.elapsed().as_millis()
            );
            match found {
                Some(m) => Ok(Emitted {
                    report: json!({
                        "run_length": run_length,
                        "m": m,
                        "non_members": (*run_length + 1),
                        "reverified": true,
                    }),
                    csv: None,
                }),
                None => Err(Failure::Indeterminate(format!(
                    "no run of {} consecutive non-members found below {bound}",
                    run_length + 1
                ))),
            }
        }
        Cmd::Defect { family, g, n } => {
            require_positive(*n, "--n")?;
            let fam: FolnerFamily = family.parse().map_err(|e: FolnerError| Failure::from(e))?;
            let elt: Element = g
                .parse()
                .map_err(|e: ergolab_core::semigroup::SgError| Failure::Usage(e.to_string()))?;
            let d = fam.defect(&elt, *n)?;
            Ok(Emitted {
                report: json!({
                    "ratio": format!("{}/{}", d.numer(), d.denom()),
                    "approx": folner::ratio_to_f64(&d),
                }),
                csv: None,
            })
        }
        Cmd::Tempered {
            family,
            n_max,
            c,
            mode,
            g,
        } => {
            if *n_max < 2 {
                return Err(Failure::Usage("--n-max must be at least 2".into()));
            }
            let fam: FolnerFamily = family.parse().map_err(|e: FolnerError| Failure::from(e))?;
            let mode = if mode == "semigroup" {
                Mode::Semigroup
            } else {
                Mode::Group
            };
            let g_set: Vec<Element> = match g {
                Some(list) => list
                    .split(';')
                    .map(|e| e.parse())
                    .collect::<Result<_, _>>()
                    .map_err(|e: ergolab_core::semigroup::SgError| Failure::Usage(e.to_string()))?,
                None => Vec::new(),
            };
            let report = folner::temperedness_scan(&fam, *n_max, *c, mode, &g_set, cli.cap)?;
            let mut csv = String::from("n,ratio,approx\n");
            for p in &report.ratios {
                csv.push_str(&format!("{},{},{}\n", p.n, p.ratio, p.approx));
            }
            Ok(Emitted {
                report: to_value(report),
                csv: Some(csv),
            })
        }
        Cmd::Criterion53 { f, n_max } => {
            require_positive(*n_max, "--n-max")?;
            let growth = parse_growth(f)?;
            let report = folner::criterion_5_3(&growth, *n_max)?;
            let mut csv = String::from("n,ratio,approx\n");
            for p in &report.values {
                csv.push_str(&format!("{},{},{}\n", p.n, p.ratio, p.approx));
            }
            Ok(Emitted {
                report: to_value(report),
                csv: Some(csv),
            })
        }
        Cmd::HeisCount { n } => {
            let report = folner::heisenberg_quotient_count(*n, cli.cap)?;
            Ok(Emitted {
                report: to_value(report),
                csv: None,
            })
        }
        Cmd::ErgodicAvg {
            system,
            obs,
            seq,
            n,
            x0,
        } => {
            require_positive(*n, "--N")?;
            let sys = parse::rotation_system(system)?;
            let observable = parse::observable(obs)?;
            let start = parse::start_point(x0, &sys)?;
            let spec = parse::seq_spec(seq)?;
            let values = spec.floor_values(*n, &pol)?;
            let rep = dynamics::orbit_average(&sys, &start, &observable, &values, &pol)?;
            Ok(Emitted {
                report: json!({
                    "average": rep.average,
                    "N": rep.n,
                    "hits": rep.hits,
                    "boundary_failures": rep.boundary_escalations,
                }),
                csv: None,
            })
        }
        Cmd::Recurrence {
            seq,
            n,
            alpha,
            beta,
            product,
        } => {
            require_positive(*n, "--N")?;
            let spec = parse::seq_spec(seq)?;
            let values = spec.floor_values(*n, &pol)?;
            match (alpha, beta, product) {
                (Some(a), Some(b), None) => {
                    let alpha: RealConstant =
                        a.parse().map_err(|e| Failure::Usage(format!("{e}")))?;
                    let beta = parse::rational(b)?;
                    let rep = dynamics::recurrence_average(&alpha, &beta, &values);
                    Ok(Emitted {
                        report: to_value(rep),
                        csv: None,
                    })
                }
                (None, None, Some(p)) => {
                    let factors = parse::recurrence_factors(p)?;
                    let rep = dynamics::product_recurrence(&factors, &values);
                    Ok(Emitted {
                        report: to_value(rep),
                        csv: None,
                    })
                }
                _ => Err(Failure::Usage(
                    "use either --alpha with --beta, or --product".into(),
                )),
            }
        }
    }
}

fn require_positive(v: u64, flag: &str) -> Result<(), Failure> {
    if v == 0 {
        return Err(Failure::Usage(format!("{flag} must be positive")));
    }
    Ok(())
}

fn parse_growth(s: &str) -> Result<folner::GrowthFn, Failure> {
    if s == "n^n" {
        return Ok(folner::GrowthFn::SelfPow);
    }
    if s == "n" {
        return Ok(folner::GrowthFn::PowK(1));
    }
    if let Some(k) = s.strip_prefix("n^") {
        return Ok(folner::GrowthFn::PowK(k.parse().map_err(|_| {
            Failure::Usage(format!("bad growth function `{s}`"))
        })?));
    }
    Ok(folner::GrowthFn::Const(s.parse().map_err(|_| {
        Failure::Usage(format!("bad growth function `{s}`"))
    })?))
}
