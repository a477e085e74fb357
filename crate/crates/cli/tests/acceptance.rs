//! End-to-end acceptance suite. Each criterion writes one PASS/FAIL line to stderr;
//! the test fails if any criterion fails.

use std::io::Write as _;
use std::process::Command;
use std::time::{Duration, Instant};

use pinchcert::certifier::{certify, Certificate, ExactValue, SMatrixReport, Status};
use pinchcert::constants::{lambda_n, PinchInput};
use pinchcert::exact::quad_sign;
use pinchcert::linalg::{classify_definiteness, det, det_cofactor, Definiteness, Strictness};
use pinchcert::optimizer::Frontier;
use pinchcert::oracle::OracleReport;
use pinchcert::{Rational, Sign};

type Outcome = Result<(), String>;

/// Report line written straight to stderr so it shows even when the
/// harness captures test output.
fn say(line: String) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

/// Every document a criterion produced, in order, plus whether detail
/// lines are printed.
struct Log {
    docs: Vec<(String, String)>,
    verbose: bool,
}

impl Log {
    fn note(&self, line: String) {
        if self.verbose {
            say(format!("    {line}"));
        }
    }
}

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn cli(args: &[&str], log: &mut Log) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pinchcert"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).expect("utf-8 output");
    log.docs.push((args.join(" "), stdout.clone()));
    (out.status.code().unwrap_or(-1), stdout)
}

fn cert(args: &[&str], log: &mut Log) -> Result<(i32, Certificate), String> {
    let (code, out) = cli(args, log);
    Certificate::from_json(&out).map(|c| (code, c)).map_err(|e| format!("{}: {e}", args.join(" ")))
}

fn exact_rational(c: &Certificate, sym: &str) -> Result<Rational, String> {
    c.constant(sym)
        .and_then(|r| r.exact.as_ref())
        .and_then(ExactValue::as_rational)
        .cloned()
        .ok_or_else(|| format!("constant {sym} has no exact rational value"))
}

fn within(x: &Rational, printed: &str, tol: &str) -> bool {
    (x - &q(printed)).abs() <= q(tol)
}

const N4: &[&str] = &["certify", "--n", "4", "--eps", "3/20", "--a", "1", "--alpha", "1", "--beta", "1/2", "--format", "json"];
const N5: &[&str] = &["certify", "--n", "5", "--eps", "1/1000", "--a", "28/25", "--alpha", "3/4", "--beta", "1/11", "--format", "json"];

fn criterion_1(log: &mut Log) -> Outcome {
    let (code, c) = cert(N4, log)?;
    ensure(code == 0, format!("exit code {code}"))?;
    let b = exact_rational(&c, "b")?;
    ensure(b == q("3"), format!("b = {b}"))
}

fn criterion_2(log: &mut Log) -> Outcome {
    let (_, c) = cert(N4, log)?;
    let (tau, eta, coeff) = (exact_rational(&c, "tau")?, exact_rational(&c, "eta")?, exact_rational(&c, "coeff")?);
    ensure(tau == q("603/2116"), format!("τ₄ = {tau}"))?;
    ensure(eta == q("406/529"), format!("η₄ = {eta}"))?;
    ensure(coeff == q("-443/529"), format!("coeff₄ = {coeff}"))?;
    ensure(within(&tau, "0.285", "5/10000"), "τ₄ decimal")?;
    ensure(within(&eta, "0.7675", "5/100000"), "η₄ decimal")?;
    ensure(within(&coeff, "-0.8374", "1/10000"), "coeff₄ decimal")
}

fn criterion_3(log: &mut Log) -> Outcome {
    let (_, c) = cert(N5, log)?;
    let b = exact_rational(&c, "b")?;
    ensure(within(&b, "4.3307", "1/10000"), format!("b₅ = {b}"))?;
    let coeff = exact_rational(&c, "coeff")?;
    ensure(within(&coeff, "-0.0297", "1/1000"), format!("coeff₅ = {coeff}"))?;
    for (sym, printed) in [("tau", "0.71657"), ("eta", "0.8911")] {
        let row = c.constant(sym).ok_or(format!("{sym} missing"))?;
        ensure(row.exact.is_some(), format!("{sym} exact value missing"))?;
        let claim = row.published.as_ref().ok_or(format!("{sym} has no printed value"))?;
        ensure(claim.printed == printed, format!("{sym} printed {}", claim.printed))?;
        ensure(!claim.matches, format!("{sym} mismatch flag not raised"))?;
        let dev = (&exact_rational(&c, sym)? - &q(printed)).abs();
        log.note(format!("{sym}₅ exact {} vs printed {printed}: deviation {:.3e}", row.exact.as_ref().unwrap(), dev.to_f64()));
    }
    Ok(())
}

fn criterion_4(log: &mut Log) -> Outcome {
    let (_, c5) = cert(N5, log)?;
    let k5 = exact_rational(&c5, "k")?;
    let s5 = SMatrixReport::build(5, &q("3/4"), &k5, &q("1/11"));
    let st5 = classify_definiteness(&s5.matrix, Strictness::Strict).map_err(|e| e.to_string())?;
    ensure(st5.classification == Definiteness::PositiveDefinite, format!("S₅ is {:?}", st5.classification))?;

    let (_, c4) = cert(N4, log)?;
    let k4 = exact_rational(&c4, "k")?;
    let s4 = SMatrixReport::build(4, &q("1"), &k4, &q("1/2"));
    let d1 = det(&s4.matrix).map_err(|e| e.to_string())?;
    let d2 = det_cofactor(&s4.matrix).map_err(|e| e.to_string())?;
    ensure(d1.is_zero() && d2.is_zero(), format!("det S₄: Bareiss {d1}, cofactor {d2}"))?;
    let embedded = c4.s_matrix.as_ref().ok_or("certificate lacks S matrix")?;
    ensure(embedded.det_bareiss == ExactValue::Rational(q("0")), "certificate det(S₄) is not 0")?;
    ensure(embedded.reproduces(), "certificate S₄ does not reproduce")
}

fn criterion_5(log: &mut Log) -> Outcome {
    let (_, c4) = cert(N4, log)?;
    let (_, c5) = cert(N5, log)?;
    let g4 = exact_rational(&c4, "gamma")?;
    let g5 = exact_rational(&c5, "gamma")?;
    let lhs4 = &g4.pow(3) * &q("1296");
    let lhs5 = &g5.pow(2) * &q("63/2");
    ensure(lhs4 >= q("1"), format!("γ₄³·36² = {lhs4}"))?;
    ensure(lhs5 >= q("1"), format!("γ₅²·63/2 = {lhs5}"))?;
    for (c, lhs, lo, hi) in [(&c4, &lhs4, "70", "72"), (&c5, &lhs5, "80", "84")] {
        let c10 = c.condition("C10").ok_or("C10 missing")?;
        ensure(c10.exact.as_ref().and_then(ExactValue::as_rational) == Some(lhs), "C10 value differs from cleared power")?;
        ensure(c10.checks.iter().all(|k| k.holds), "C10 check does not hold")?;
        let br = c
            .constant("vol_bound_pi2")
            .and_then(|r| r.bracket.clone())
            .ok_or("volume bracket missing")?;
        ensure(br.lo >= q(lo) && br.hi <= q(hi), format!("volume bracket [{}, {}] outside [{lo}, {hi}]", br.lo.to_f64(), br.hi.to_f64()))?;
    }
    Ok(())
}

fn criterion_6(log: &mut Log) -> Outcome {
    let l4 = lambda_n(&PinchInput::new(4, q("3/20")).map_err(|e| e.to_string())?);
    ensure(quad_sign(&l4) == Sign::Positive, "Λ₄ is not positive")?;
    let l5 = lambda_n(&PinchInput::new(5, q("1/1000")).map_err(|e| e.to_string())?);
    ensure(l5.as_rational() == Some(&q("198/1001")), format!("Λ₅ = {l5}"))?;
    for (args, printed) in [(N4, "0.0335"), (N5, "0.1998")] {
        let (_, c) = cert(args, log)?;
        let row = c.constant("lambda").ok_or("lambda missing")?;
        let claim = row.published.as_ref().ok_or("lambda has no printed value")?;
        ensure(claim.printed == printed && !claim.matches, format!("Λ claim {claim:?}"))?;
        ensure(c.condition("C2").is_some_and(|r| r.pass), "C2 does not pass")?;
    }
    Ok(())
}

fn oracle(args: &[&str], log: &mut Log) -> Result<(OracleReport, Duration), String> {
    let t = Instant::now();
    let (code, out) = cli(args, log);
    let elapsed = t.elapsed();
    let r: OracleReport = serde_json::from_str(&out).map_err(|e| format!("{}: {e}", args.join(" ")))?;
    ensure(code == 0, format!("{} exited {code}", args.join(" ")))?;
    Ok((r, elapsed))
}

fn criterion_7(log: &mut Log) -> Outcome {
    for (n, eps, vmax, bound) in [("4", "3/20", Some("18/929"), Some("27/529")), ("5", "1/1000", None, None)] {
        let (r, t) = oracle(&["oracle", "lemma-ratio", "--n", n, "--eps", eps, "--samples", "1000000", "--seed", "7"], log)?;
        ensure(r.pass && r.samples == 1_000_000, format!("n = {n}: pass {}", r.pass))?;
        ensure(t < Duration::from_secs(60), format!("n = {n}: {t:?}"))?;
        let observed = q(&r.observed_max);
        ensure(observed <= r.bound, "vertex max above bound")?;
        if let (Some(v), Some(b)) = (vmax, bound) {
            ensure(observed == q(v) && r.bound == q(b), format!("vertex max {} bound {}", r.observed_max, r.bound))?;
        }
        let excess: f64 = r.details["sampled_excess_over_vertex_max"].parse().map_err(|_| "excess unparsable")?;
        ensure(excess <= 1e-12, format!("samples exceed vertex max by {excess}"))?;
        log.note(format!("n = {n}: vertex max {} ≤ {}, {} samples in {:.2?}", r.observed_max, r.bound, r.samples, t));
    }
    Ok(())
}

fn criterion_8(log: &mut Log) -> Outcome {
    for n in ["4", "5"] {
        let (r, _) = oracle(&["oracle", "quadform", "--n", n, "--samples", "100000", "--seed", "7"], log)?;
        ensure(r.pass && r.samples == 100_000, format!("n = {n}: pass {}", r.pass))?;
        ensure(r.details["identity_holds"] == "true", format!("n = {n}: identity fails"))?;
        ensure(r.details["samples_respect_bound"] == "true", format!("n = {n}: a sample beats the bound"))?;
        ensure(r.details["value_at_minimizer"] == r.details["minimum"], format!("n = {n}: minimizer value differs"))?;
    }
    Ok(())
}

fn criterion_9(log: &mut Log) -> Outcome {
    let (_, c4) = cert(N4, log)?;
    ensure(exact_rational(&c4, "theta")? == q("1624/1095"), "θ₄ exact value")?;
    let c9 = c4.condition("C9").ok_or("C9 missing")?;
    ensure(c9.status == Status::Pass && c9.checks.iter().all(|k| k.rhs == ExactValue::Rational(q("2"))), "θ₄ ≤ 2 verdict")?;

    let (_, c5) = cert(N5, log)?;
    let c9 = c5.condition("C9").ok_or("C9 missing")?;
    let theta5 = c9.exact.as_ref().and_then(ExactValue::as_rational).ok_or("θ₅ not exact")?;
    ensure(*theta5 == exact_rational(&c5, "theta")?, "θ₅ row and condition disagree")?;
    let claim = c9.published.as_ref().ok_or("θ₅ printed value not recorded")?;
    ensure(claim.printed == "1.3627" && !claim.matches, "θ₅ printed value flag")?;
    ensure(matches!(c9.status, Status::Pass | Status::Fail), "θ₅ verdict missing")?;
    let (_, md) = cli(&[&N5[..N5.len() - 2], &["--format", "markdown"]].concat(), log);
    ensure(md.contains("1.3627") && md.contains(&theta5.to_string()), "markdown lacks θ₅ side-by-side")?;
    log.note(format!("θ₅ = {theta5} ≈ {:.6}, verdict {}, printed 1.3627", theta5.to_f64(), c9.status.label()));
    Ok(())
}

fn search(args: &[&str], min: &str, log: &mut Log) -> Outcome {
    let (code, out) = cli(args, log);
    let f: Frontier = serde_json::from_str(&out).map_err(|e| format!("{}: {e}", args.join(" ")))?;
    ensure(code == 0, format!("search exited {code}"))?;
    let max = f.max_eps.clone().ok_or("no feasible ε")?;
    ensure(max >= q(min), format!("max ε = {max} < {min}"))?;
    let w = f.witness.as_ref().ok_or("no witness")?;
    ensure(w.eps == max, "witness ε differs from max ε")?;
    let (a, alpha, beta, eps) = (w.a.to_string(), w.alpha.to_string(), w.beta.to_string(), w.eps.to_string());
    let mut cargs = vec!["certify", "--n", args[2], "--eps", &eps, "--a", &a, "--alpha", &alpha, "--beta", &beta, "--format", "json"];
    if args.contains(&"skip") {
        cargs.extend(["--theta-rule", "skip"]);
    }
    let (code, _) = cli(&cargs, log);
    ensure(code == 0, format!("witness re-certify exited {code}"))?;
    for p in &f.history {
        if let Some(w) = &p.witness {
            ensure(certify(w).map_err(|e| e.to_string())?.passed(), format!("history witness at {} fails", p.eps))?;
        }
    }
    log.note(format!("{}: max ε = {max} ≈ {:.6}", args[..3].join(" "), max.to_f64()));
    Ok(())
}

fn criterion_10(log: &mut Log) -> Outcome {
    let t = Instant::now();
    let common = ["--eps-min", "0", "--eps-max", "1/2", "--grid", "16", "--refine", "6", "--format", "json"];
    search(&[&["search", "--n", "4"][..], &common].concat(), "3/20", log)?;
    search(&[&["search", "--n", "5", "--theta-rule", "skip"][..], &common].concat(), "1/1000", log)?;
    let t = t.elapsed();
    log.note(format!("both searches in {t:.2?}"));
    ensure(t < Duration::from_secs(180), format!("searches took {t:?}"))
}

type Criterion = fn(&mut Log) -> Outcome;

const CRITERIA: [(u32, &str, Criterion); 10] = [
    (1, "b constant reproduction", criterion_1),
    (2, "τ/η reproduction, n = 4", criterion_2),
    (3, "τ/η reproduction, n = 5", criterion_3),
    (4, "S matrix certification", criterion_4),
    (5, "volume bounds", criterion_5),
    (6, "positivity certificates", criterion_6),
    (7, "lemma oracle", criterion_7),
    (8, "quadratic-form oracle", criterion_8),
    (9, "θ condition", criterion_9),
    (10, "optimizer sanity", criterion_10),
];

fn run_all(verbose: bool) -> (Vec<(u32, &'static str, Outcome)>, Log) {
    let mut log = Log { docs: Vec::new(), verbose };
    let mut results = Vec::new();
    for (id, name, f) in CRITERIA {
        let r = f(&mut log);
        if verbose {
            say(format!("criterion {id} ({name}): {}", if r.is_ok() { "PASS" } else { "FAIL" }));
            if let Err(e) = &r {
                say(format!("    {e}"));
            }
        }
        results.push((id, name, r));
    }
    (results, log)
}

#[test]
fn acceptance_criteria() {
    let (results, first) = run_all(true);
    let (_, second) = run_all(false);
    let (first, second) = (first.docs, second.docs);
    let determinism: Outcome = if first.len() != second.len() {
        Err(format!("{} documents then {}", first.len(), second.len()))
    } else {
        first
            .iter()
            .zip(&second)
            .find(|(a, b)| a.1.as_bytes() != b.1.as_bytes())
            .map_or(Ok(()), |(a, _)| Err(format!("output of `{}` differs between runs", a.0)))
    };
    say(format!("criterion 11 (determinism): {}", if determinism.is_ok() { "PASS" } else { "FAIL" }));
    if let Err(e) = &determinism {
        say(format!("    {e}"));
    }
    let failed: Vec<u32> = results
        .iter()
        .filter(|r| r.2.is_err())
        .map(|r| r.0)
        .chain(determinism.is_err().then_some(11))
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
