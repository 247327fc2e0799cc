use std::fs;
use std::path::Path;
use std::str::FromStr;

use hinge_core::algebra::{identifiers, parse_poly, sturm_roots, MonomialOrder, PolyRing, Rational, UniPoly};
use hinge_core::dynamics::presets::{preset, random_expanding_state, Preset, DEFAULT_SEED};
use hinge_core::dynamics::{
    first_integrals, integrate, parse_config, trajectory_csv, BodyState, DynamicsError,
};
use hinge_core::hinge::{certify_with, replay_with, Certificate, HingeError, OrderConvention, Verdict};
use hinge_core::reduction::{reduce_check as run_reduce_check, reduced_header, ReduceCheck};
use hinge_core::Exec;
use serde_json::json;

use crate::RunArgs;

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn falsified(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        let code = if matches!(e, DynamicsError::NearCollision { .. }) { 2 } else { 1 };
        Self { code, message: e.to_string() }
    }
}

impl From<HingeError> for CliError {
    fn from(e: HingeError) -> Self {
        match e {
            HingeError::UnsupportedN(n) => Self::usage(format!("unsupported n = {n} (expected 3 or 4)")),
            other => Self::falsified(other.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

struct Run {
    source: String,
    state: BodyState,
    tol: f64,
    t_end: f64,
}

fn load(args: &RunArgs) -> Result<Run> {
    let mut run = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            let cfg = parse_config(&text)?;
            Run {
                source: format!("config {}", path.display()),
                state: cfg.state,
                tol: cfg.tol,
                t_end: cfg.t_end,
            }
        }
        (None, Some(name)) => {
            let p = Preset::from_str(name).map_err(CliError::usage)?;
            let seed = args.seed.unwrap_or(DEFAULT_SEED);
            let mut pr = preset(p, seed);
            if p == Preset::RandomSeeded {
                if let Some(n) = args.n {
                    if n < 2 {
                        return Err(CliError::usage("--n must be at least 2"));
                    }
                    pr.state = random_expanding_state(n, 3, seed);
                }
            } else if args.n.is_some() {
                return Err(CliError::usage("--n only applies to random-seeded"));
            }
            Run {
                source: format!("preset {name}"),
                state: pr.state,
                tol: pr.tol,
                t_end: pr.t_end,
            }
        }
        (None, None) => return Err(CliError::usage("one of --config or --preset is required")),
    };
    if let Some(tol) = args.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::usage(format!("--tol must be positive, got {tol}")));
        }
        run.tol = tol;
    }
    if let Some(t) = args.t_end {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::usage(format!("--t-end must be positive, got {t}")));
        }
        run.t_end = t;
    }
    Ok(run)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

pub fn simulate(args: &RunArgs) -> Result<()> {
    let run = load(args)?;
    let traj = match integrate(&run.state, run.t_end, run.tol) {
        Ok(t) => t,
        Err(DynamicsError::NearCollision { t, min_distance, .. }) => {
            return Err(CliError {
                code: 2,
                message: format!("near-collision abort at t = {t} (min distance {min_distance:e})"),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let e0 = first_integrals(&run.state).energy;
    let r0 = run.state.distances();
    let mut drift: f64 = 0.0;
    let mut min_distance = f64::INFINITY;
    let mut max_dev: f64 = 0.0;
    for s in &traj.samples {
        drift = drift.max((first_integrals(&s.state).energy - e0).abs() / e0.abs().max(f64::MIN_POSITIVE));
        min_distance = min_distance.min(s.state.min_distance());
        for (r, q) in s.state.distances().iter().zip(&r0) {
            max_dev = max_dev.max((r - q).abs());
        }
    }
    if let Some(out) = &args.out {
        let csv = trajectory_csv(&traj).map_err(|e| CliError::usage(e.to_string()))?;
        write(out, &csv)?;
    }
    print_json(&json!({
        "source": run.source,
        "n": run.state.n(),
        "d": run.state.dim(),
        "t_end": run.t_end,
        "tol": run.tol,
        "accepted_steps": traj.samples.len() - 1,
        "rejected_steps": traj.rejected_steps,
        "energy": e0,
        "max_relative_energy_drift": drift,
        "min_distance": min_distance,
        "max_distance_deviation": max_dev,
        "out": args.out.as_ref().map(|p| p.display().to_string()),
    }));
    Ok(())
}

fn check_csv(check: &ReduceCheck, n: usize) -> Result<String> {
    let names: Vec<String> = reduced_header(n).into_iter().skip(1).collect();
    let mut header = vec!["t".to_string()];
    for prefix in ["", "fd_", "rhs_"] {
        header.extend(names.iter().map(|c| format!("{prefix}{c}")));
    }
    header.push("residual".into());
    let mut lines = vec![header.join(",")];
    for row in &check.rows {
        let mut cells = vec![row.t.to_string()];
        for st in [&row.coords, &row.fd, &row.rhs] {
            cells.extend(st.flat().iter().map(f64::to_string));
        }
        cells.push(row.residual.to_string());
        lines.push(cells.join(","));
    }
    Ok(lines.join("\n") + "\n")
}

pub fn reduce_check(args: &RunArgs, h: f64) -> Result<()> {
    let run = load(args)?;
    let check = run_reduce_check(&run.state, run.t_end, run.tol, h)?;
    let max_rhs = check
        .rows
        .iter()
        .flat_map(|r| r.rhs.flat())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(out) = &args.out {
        write(out, &check_csv(&check, run.state.n())?)?;
    }
    print_json(&json!({
        "source": run.source,
        "n": run.state.n(),
        "t_end": run.t_end,
        "tol": run.tol,
        "h": h,
        "samples": check.rows.len(),
        "max_residual": check.max_residual,
        "max_abs_reduced_derivative": max_rhs,
        "out": args.out.as_ref().map(|p| p.display().to_string()),
    }));
    Ok(())
}

fn exec(sequential: bool) -> Exec {
    if sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

pub fn certify(n: usize, conv: OrderConvention, out: Option<&Path>, sequential: bool) -> Result<()> {
    let cert = certify_with(n, conv, exec(sequential))?;
    let text = cert.to_json();
    match out {
        Some(p) => write(p, &(text + "\n"))?,
        None => println!("{text}"),
    }
    let verdict = match cert.verdict {
        Verdict::Unhinged => "UNHINGED",
        Verdict::Failure => "FAILURE",
    };
    eprintln!(
        "verdict: {verdict} (n = {n}, {conv}, {} coefficients)",
        cert.coefficients.len()
    );
    match cert.verdict {
        Verdict::Unhinged => Ok(()),
        Verdict::Failure => Err(CliError::falsified(cert.failures.join("; "))),
    }
}

pub fn replay(path: &Path, sequential: bool) -> Result<()> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let cert = Certificate::from_json(&text)
        .map_err(|e| CliError::usage(format!("{} is not a certificate: {e}", path.display())))?;
    let report = replay_with(&cert, exec(sequential))?;
    print_json(&json!({
        "certificate": path.display().to_string(),
        "identical": report.identical,
        "differences": report.differences,
    }));
    if report.identical {
        Ok(())
    } else {
        Err(CliError::falsified("certificate does not replay"))
    }
}

/// Integers, fractions `a/b`, or decimals (taken at their exact binary value).
fn rational(flag: &str, s: &str) -> Result<Rational> {
    if let Ok(q) = Rational::from_str(s.trim()) {
        return Ok(q);
    }
    s.trim()
        .parse::<f64>()
        .ok()
        .and_then(Rational::from_float)
        .ok_or_else(|| CliError::usage(format!("--{flag}: `{s}` is not a number")))
}

pub fn roots(poly: &str, lo: &str, hi: &str, width: &str) -> Result<()> {
    let names = identifiers(poly).map_err(|e| CliError::usage(e.to_string()))?;
    if names.len() > 1 {
        return Err(CliError::usage(format!(
            "polynomial is not univariate (variables {})",
            names.join(", ")
        )));
    }
    let var = names.first().cloned().unwrap_or_else(|| "x".into());
    let ring = PolyRing::with_vars([var.as_str()], MonomialOrder::DegRevLex)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let p = parse_poly(poly, &ring).map_err(|e| CliError::usage(e.to_string()))?;
    let u = UniPoly::from_poly(&p).map_err(|e| CliError::usage(e.to_string()))?;
    let (lo, hi, width) = (rational("lo", lo)?, rational("hi", hi)?, rational("width", width)?);
    if width <= Rational::from_integer(0.into()) {
        return Err(CliError::usage("--width must be positive"));
    }
    let report = sturm_roots(&u, &lo, &hi, &width).map_err(|e| CliError::usage(e.to_string()))?;
    print_json(&json!({
        "poly": p.to_string(),
        "interval": [lo.to_string(), hi.to_string()],
        "count": report.count,
        "intervals": report.intervals.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect::<Vec<_>>(),
    }));
    Ok(())
}
