use std::io::{self, BufRead, Read, Write};
use std::path::Path;

use laststop::biased::{self, Method, SolveReport};
use laststop::{continuous, montecarlo, oracle, symmetric};
use laststop::{validate_spec, Kind, ProblemSpec, StoppingRegion, ThresholdPolicy};
use serde::Deserialize;

use crate::args::{Command, EvalMethod, Format, PolicyArgs, SolveMethod, SpecArgs};
use crate::output::{sig, Record};
use crate::CliError;

pub fn run(command: Command) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    match command {
        Command::Solve {
            spec,
            method,
            format,
        } => {
            let spec = load_spec(&spec)?;
            let report = solve(&spec, method)?;
            let record = Record::default()
                .int("s", report.thresholds.s as u64)
                .int("s_prime", report.thresholds.s_prime as u64)
                .float("value", report.value)
                .text("method", report.method.as_str());
            emit(&mut out, &record, format)?;
        }
        Command::Evaluate {
            spec,
            policy,
            method,
            format,
        } => {
            let spec = load_spec(&spec)?;
            let policy = load_policy(&policy, spec.n())?;
            let region = StoppingRegion::threshold(spec.n(), policy);
            let enumerate = match method {
                EvalMethod::Auto => spec.n() <= oracle::MAX_ENUMERATION_N,
                EvalMethod::Enumerate => true,
                EvalMethod::Exact => false,
            };
            let (value, used) = if enumerate {
                (oracle::enumerate_policy_value(&spec, &region)?, "enumerate")
            } else {
                (oracle::policy_value(&spec, &region)?, "exact")
            };
            let record = Record::default()
                .int("s", policy.s as u64)
                .int("s_prime", policy.s_prime as u64)
                .float("value", value)
                .text("method", used);
            emit(&mut out, &record, format)?;
        }
        Command::Simulate {
            spec,
            policy,
            trials,
            seed,
            format,
        } => {
            let spec = load_spec(&spec)?;
            let policy = load_policy(&policy, spec.n())?;
            let region = StoppingRegion::threshold(spec.n(), policy);
            let r = montecarlo::estimate(&spec, &region, trials, seed)?;
            let record = Record::default()
                .float("estimate", r.estimate)
                .float("stderr", r.stderr)
                .int("trials", r.trials)
                .int("seed", r.seed)
                .int("wins", r.wins);
            emit(&mut out, &record, format)?;
        }
        Command::Sweep { spec, modes } => {
            let spec = load_spec(&spec)?;
            sweep(&mut out, &spec, modes)?;
        }
        Command::Approx { n, p, format } => {
            let r = continuous::optimal_x(n, p)?;
            let mut record = Record::default()
                .int("n", n as u64)
                .float("p", p)
                .float("beta", r.beta)
                .float("x_star", r.x_star)
                .float("value", r.value)
                .boolean("interior", r.interior);
            if n >= 2 {
                record = record
                    .float("optimal_value", continuous::optimal_value(n)?)
                    .float("interior_threshold", continuous::interior_threshold(n)?);
            }
            emit(&mut out, &record, format)?;
        }
        Command::Advise { spec, s, s_prime } => {
            let spec = load_spec(&spec)?;
            let policy = match (s, s_prime) {
                (Some(s), Some(sp)) => ThresholdPolicy::new(spec.n(), s, sp)?,
                _ => solve(&spec, SolveMethod::Auto)?.thresholds,
            };
            eprintln!(
                "laststop: n = {}, thresholds s = {}, s_prime = {}",
                spec.n(),
                policy.s,
                policy.s_prime
            );
            advise(io::stdin().lock(), &mut out, spec.n(), policy)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn emit(out: &mut impl Write, record: &Record, format: Format) -> Result<(), CliError> {
    let text = match format {
        Format::Text => record.to_text(),
        Format::Json => record.to_json(),
        Format::Csv => record.to_csv(),
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn load_spec(args: &SpecArgs) -> Result<ProblemSpec, CliError> {
    Ok(validate_spec(&args.to_raw()?)?)
}

#[derive(Deserialize)]
struct PolicyFile {
    s: usize,
    s_prime: usize,
}

fn load_policy(args: &PolicyArgs, n: usize) -> Result<ThresholdPolicy, CliError> {
    let (s, s_prime) = match (&args.policy_file, args.s, args.s_prime) {
        (Some(path), _, _) => {
            let text = if path == Path::new("-") {
                let mut buf = String::new();
                io::stdin().read_to_string(&mut buf)?;
                buf
            } else {
                std::fs::read_to_string(path)
                    .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?
            };
            let file: PolicyFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Invalid(format!("policy file: {e}")))?;
            (file.s, file.s_prime)
        }
        (None, Some(s), Some(sp)) => (s, sp),
        _ => return Err(CliError::Invalid("missing --s/--s-prime".into())),
    };
    Ok(ThresholdPolicy::new(n, s, s_prime)?)
}

fn constant_probs(spec: &ProblemSpec, method: &str) -> Result<(f64, f64), CliError> {
    match (spec.p(), spec.p_prime()) {
        (Some(p), Some(pp)) => Ok((p, pp)),
        _ => Err(CliError::Invalid(format!(
            "method {method} needs constant probabilities (kind weber or biased), got {}",
            spec.kind()
        ))),
    }
}

fn symmetric_probs(spec: &ProblemSpec, method: &str) -> Result<Vec<f64>, CliError> {
    match spec.kind() {
        Kind::Weber | Kind::TimeVarying => Ok(spec.plus_seq().to_vec()),
        kind => Err(CliError::Invalid(format!(
            "method {method} needs equal probabilities of +1 and -1, got kind {kind}"
        ))),
    }
}

fn dp_report(spec: &ProblemSpec) -> SolveReport {
    let dp = oracle::solve_backward(spec);
    SolveReport {
        thresholds: dp.policy,
        value: dp.value,
        method: Method::Dp,
        evaluation_count: spec.n(),
    }
}

fn lambda_report(probs: &[f64]) -> Result<SolveReport, CliError> {
    let sol = symmetric::solve_time_varying(probs)?;
    Ok(SolveReport {
        thresholds: sol.policy,
        value: sol.value,
        method: Method::Lambda,
        evaluation_count: sol.lambda_evaluations,
    })
}

/// Dispatches to the requested solver; `Auto` picks the fast route for the
/// spec's kind.
pub fn solve(spec: &ProblemSpec, method: SolveMethod) -> Result<SolveReport, CliError> {
    let n = spec.n();
    let method = match method {
        SolveMethod::Auto => match spec.kind() {
            Kind::Weber => SolveMethod::Weber,
            Kind::Biased => SolveMethod::Walk,
            Kind::TimeVarying => SolveMethod::Lambda,
            Kind::General => SolveMethod::Dp,
        },
        m => m,
    };
    match method {
        SolveMethod::Auto => unreachable!("resolved above"),
        SolveMethod::Dp => Ok(dp_report(spec)),
        SolveMethod::Walk => {
            let (p, pp) = constant_probs(spec, "walk")?;
            Ok(biased::solve_walk(n, p, pp)?)
        }
        SolveMethod::Bisection => {
            let (p, pp) = constant_probs(spec, "bisection")?;
            match biased::solve_bisection(n, p, pp) {
                Err(e @ laststop::Error::UnimodalityViolation { .. }) => {
                    eprintln!("laststop: {e}; falling back to dynamic programming");
                    Ok(dp_report(spec))
                }
                other => Ok(other?),
            }
        }
        SolveMethod::Odds => {
            if spec.minus_seq().iter().any(|&b| b != 0.0) {
                return Err(CliError::Invalid(
                    "method odds needs P(-1) = 0 at every stage".into(),
                ));
            }
            Ok(biased::odds_threshold(spec.plus_seq())?)
        }
        SolveMethod::Weber => {
            if spec.kind() != Kind::Weber {
                return Err(CliError::Invalid(format!(
                    "method weber needs kind weber, got {}",
                    spec.kind()
                )));
            }
            let sol = symmetric::weber_threshold(n, spec.plus_prob(1))?;
            Ok(SolveReport {
                thresholds: ThresholdPolicy {
                    s: sol.s,
                    s_prime: sol.s,
                },
                value: sol.value,
                method: Method::Weber,
                evaluation_count: n - sol.s + 1,
            })
        }
        SolveMethod::Lambda => lambda_report(&symmetric_probs(spec, "lambda")?),
    }
}

fn sweep(out: &mut impl Write, spec: &ProblemSpec, modes: bool) -> Result<(), CliError> {
    let (p, pp) = match (spec.kind(), spec.p(), spec.p_prime()) {
        (Kind::Weber | Kind::Biased, Some(p), Some(pp)) => (p, pp),
        _ => {
            return Err(CliError::Invalid(format!(
                "sweep needs kind biased (or weber), got {}",
                spec.kind()
            )))
        }
    };
    let grid = biased::w_recurrence(spec.n(), p, pp)?;
    writeln!(out, "k_plus,k_minus,w")?;
    for (j, k, w) in grid.rows() {
        writeln!(out, "{j},{k},{}", sig(w))?;
    }
    if modes {
        let m = biased::modes(spec.n(), p, pp)?;
        writeln!(out)?;
        writeln!(out, "k_minus,argmax_j")?;
        for (k, j) in m.plus_modes.iter().enumerate() {
            writeln!(out, "{},{j}", k + 1)?;
        }
        writeln!(out)?;
        writeln!(out, "k_plus,argmax_k")?;
        for (j, k) in m.minus_modes.iter().enumerate() {
            writeln!(out, "{},{k}", j + 1)?;
        }
    }
    Ok(())
}

fn parse_observation(line: &str) -> Option<i8> {
    match line {
        "+1" | "1" => Some(1),
        "-1" => Some(-1),
        "0" => Some(0),
        _ => None,
    }
}

/// One answer per observation; ends after the first STOP or at stage `n`.
/// Blank lines are skipped.
pub fn advise(
    input: impl BufRead,
    out: &mut impl Write,
    n: usize,
    policy: ThresholdPolicy,
) -> Result<(), CliError> {
    let mut stage = 0;
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let x = parse_observation(line).ok_or_else(|| {
            CliError::Stream(format!(
                "line {}: expected +1, -1 or 0, got `{line}`",
                lineno + 1
            ))
        })?;
        stage += 1;
        let stop =
            stage == n || (x == 1 && stage >= policy.s) || (x == -1 && stage >= policy.s_prime);
        writeln!(out, "{}", if stop { "STOP" } else { "CONTINUE" })?;
        out.flush()?;
        if stop {
            break;
        }
    }
    Ok(())
}
