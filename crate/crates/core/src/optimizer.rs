//! Parameter search: feasibility of a pinching gap over `(a, α, β)` with
//! `k = 1/η`, and bisection for the largest certifiable gap.
//!
//! Floating point only ranks candidates. A witness is returned only after an
//! exact [`certify`] call passes.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certifier::{certify, KChoice, ParamSet, ThetaRule, MAX_N, MIN_N};
use crate::constants::{build_b_matrix, lambda_n, pinch_x, PinchInput};
use crate::exact::Rational;
use crate::linalg::Strictness;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Denominator cap for snapped candidates.
pub const SNAP_DENOM: u64 = 10_000;
/// Exact certifications attempted per feasibility probe.
const TOP_CANDIDATES: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
}

pub const DEFAULT_BISECT_STEPS: u32 = 14;

fn default_bisect_steps() -> u32 {
    DEFAULT_BISECT_STEPS
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: u32,
    pub eps_min: Rational,
    pub eps_max: Rational,
    /// Points per axis.
    pub grid: u32,
    pub refine_rounds: u32,
    /// Bisection halvings of the ε range.
    #[serde(default = "default_bisect_steps")]
    pub bisect_steps: u32,
    pub strictness: Strictness,
    pub seed: u64,
    pub theta_rule: ThetaRule,
    pub a_cap: Rational,
}

impl SearchConfig {
    pub fn new(n: u32) -> Self {
        SearchConfig {
            n,
            eps_min: Rational::zero(),
            eps_max: Rational::frac(1, 2),
            grid: 16,
            refine_rounds: 6,
            bisect_steps: DEFAULT_BISECT_STEPS,
            strictness: Strictness::AllowSemidefinite,
            seed: 0,
            theta_rule: ThetaRule::Displayed,
            a_cap: Rational::integer(4),
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: String| Err(SearchError::InvalidConfig(m));
        if !(MIN_N..=MAX_N).contains(&self.n) {
            return bad(format!("n = {} outside [{MIN_N}, {MAX_N}]", self.n));
        }
        if self.grid < 2 {
            return bad("grid must be at least 2".into());
        }
        if self.refine_rounds > 20 {
            return bad("refine rounds must be at most 20".into());
        }
        if !(1..=64).contains(&self.bisect_steps) {
            return bad("bisect steps must lie in [1, 64]".into());
        }
        if self.eps_min > self.eps_max {
            return bad("eps range is not ordered".into());
        }
        if self.eps_min.is_negative() {
            return bad("eps range must be nonnegative".into());
        }
        if self.a_cap < Rational::frac(1, 2) {
            return bad("a cap must be at least 1/2".into());
        }
        Ok(())
    }
}

/// Signed margins of the verdict conditions in floating point. The smallest
/// one is the candidate's score.
#[derive(Clone, Debug, PartialEq)]
pub struct Margins {
    pub values: Vec<(&'static str, f64)>,
}

impl Margins {
    pub fn score(&self) -> f64 {
        self.values.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min)
    }

    pub fn binding(&self) -> &'static str {
        self.values
            .iter()
            .fold(("", f64::INFINITY), |best, &(id, v)| if v < best.1 { (id, v) } else { best })
            .0
    }
}

/// Float quantities that depend only on `(n, ε)`.
#[derive(Clone, Copy, Debug)]
struct EpsData {
    x: f64,
    lambda: f64,
}

fn eps_data(n: u32, eps: &Rational) -> EpsData {
    let pin = PinchInput::new(n, eps.clone()).expect("validated range");
    EpsData { x: pinch_x(&pin).to_f64(), lambda: lambda_n(&pin).to_f64() }
}

/// Leading minors of `B` and `b = ¼C̄ᵀB⁻¹C̄` in floating point.
fn b_float(n: u32, a: &Rational, alpha: &Rational) -> (f64, Option<f64>) {
    let (b, c) = build_b_matrix(n, a, alpha).expect("n ≥ 4");
    let d = n as usize;
    let m = DMatrix::from_fn(d, d, |i, j| b.get(i, j).to_f64());
    let min_minor = (1..=d).map(|k| m.view((0, 0), (k, k)).determinant()).fold(f64::INFINITY, f64::min);
    let cv = DVector::from_iterator(d, c.iter().map(Rational::to_f64));
    let bval = m.cholesky().map(|ch| cv.dot(&ch.solve(&cv)) / 4.0);
    (min_minor, bval)
}

/// Float mirror of the certificate's verdict conditions C2–C9.
pub fn margins(
    n: u32,
    eps: &Rational,
    a: &Rational,
    alpha: &Rational,
    beta: &Rational,
    theta_rule: ThetaRule,
) -> Margins {
    let ed = eps_data(n, eps);
    let (bmin, bval) = b_float(n, a, alpha);
    margins_with(n, ed, bmin, bval, a.to_f64(), alpha.to_f64(), beta.to_f64(), theta_rule)
}

#[allow(clippy::too_many_arguments)]
fn margins_with(
    n: u32,
    ed: EpsData,
    bmin: f64,
    bval: Option<f64>,
    a: f64,
    alpha: f64,
    beta: f64,
    theta_rule: ThetaRule,
) -> Margins {
    let nf = n as f64;
    let x = ed.x;
    let mut v = vec![
        ("C2", ed.lambda),
        ("C3", (a - 0.5).min(2.0 * a - alpha).min(1.0 - alpha)),
        ("C4", bmin),
        ("C5", x),
    ];
    let eta = x / a;
    let tau = bval.map(|b| {
        let an2 = alpha * (nf - 2.0);
        let base = x * (2.0 * (nf - 1.0 + an2) - b / a) - (4.0 * nf + 1.0) * (nf - 2.0) / 8.0;
        let coeff = x * (b - (2.0 * nf - 2.0 + an2)) / a + (nf - 2.0) * (nf + 2.0) / 4.0;
        base + coeff.min(0.0)
    });
    v.push(("C6", tau.map_or(f64::NEG_INFINITY, |t| t.min(eta))));
    let k = a / x;
    v.push(("C7", k.min(4.0 - k)));
    let n1 = nf - 1.0;
    let s11 = 1.0 / n1 + alpha / n1 - alpha / (n1 * n1) + 1.0 / k - 1.0;
    let s12sq = (alpha / 2.0).powi(2) * (nf - 2.0) / n1 * (1.0 - 2.0 / n1).powi(2);
    let s13 = 0.5 - 1.0 / k;
    let s22 = 1.0 - (nf - 2.0) * alpha / n1;
    let s33 = 1.0 / k - beta;
    let d2 = s11 * s22 - s12sq;
    let d3 = d2 * s33 - s13 * s13 * s22;
    v.push(("C8", s11.min(d2).min(d3)));
    if theta_rule == ThetaRule::Displayed {
        let bound = (nf - 2.0) / (nf - 3.0);
        let m = if 4.0 * eta > 1.0 { bound - 4.0 * eta / ((4.0 * eta - 1.0) * alpha) } else { 4.0 * eta - 1.0 };
        v.push(("C9", m));
    }
    if !x.is_finite() || x <= 0.0 {
        v.push(("C5", f64::NEG_INFINITY));
    }
    Margins { values: v }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Candidate {
    a: Rational,
    alpha: Rational,
    beta: Rational,
}

fn snap(x: &Rational) -> Rational {
    x.limit_denominator(SNAP_DENOM)
}

/// Outcome of one feasibility probe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    pub eps: Rational,
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<ParamSet>,
    /// Condition with the smallest float margin at the best candidate.
    pub binding: String,
    /// Float score of the best candidate, rendered in scientific notation.
    pub score: String,
    pub candidates_scored: u64,
    pub candidates_certified: u64,
}

fn param_set(cfg: &SearchConfig, eps: &Rational, c: &Candidate) -> ParamSet {
    ParamSet {
        n: cfg.n,
        eps: eps.clone(),
        a: c.a.clone(),
        alpha: c.alpha.clone(),
        k: KChoice::Auto,
        beta: c.beta.clone(),
        strictness: cfg.strictness,
        theta_rule: cfg.theta_rule,
    }
}

fn score_all(cfg: &SearchConfig, eps: &Rational, ed: EpsData, cands: &[Candidate]) -> Vec<(f64, &'static str)> {
    let eval = |c: &Candidate| {
        let (bmin, bval) = b_float(cfg.n, &c.a, &c.alpha);
        let m = margins_with(cfg.n, ed, bmin, bval, c.a.to_f64(), c.alpha.to_f64(), c.beta.to_f64(), cfg.theta_rule);
        (m.score(), m.binding())
    };
    let _ = eps;
    #[cfg(feature = "parallel")]
    {
        cands.par_iter().map(eval).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        cands.iter().map(eval).collect()
    }
}

fn grid_candidates(cfg: &SearchConfig, x: &Rational) -> Vec<Candidate> {
    let g = cfg.grid as i64;
    let half = Rational::frac(1, 2);
    let mut out = Vec::new();
    for i in 1..=g {
        let alpha = Rational::frac(i, g);
        let a_lo = half.clone().max(&alpha / &Rational::integer(2));
        let step = &(&cfg.a_cap - &a_lo) / &Rational::integer(g);
        for j in 0..=g {
            let a = snap(&(&a_lo + &(&step * &Rational::integer(j))));
            let eta = x / &a;
            for l in 1..g {
                let beta = snap(&(&eta * &Rational::frac(l, g)));
                if beta.is_positive() {
                    out.push(Candidate { a: a.clone(), alpha: alpha.clone(), beta });
                }
            }
        }
    }
    out
}

/// Keep a candidate inside the search box: `0 < α ≤ 1`,
/// `max(½, α/2) ≤ a ≤ cap`, `0 < β`.
fn clamp(cfg: &SearchConfig, c: Candidate) -> Option<Candidate> {
    let one = Rational::one();
    let alpha = snap(&c.alpha.min(one));
    if !alpha.is_positive() {
        return None;
    }
    let a_lo = Rational::frac(1, 2).max(&alpha / &Rational::integer(2));
    let a = snap(&c.a.max(a_lo).min(cfg.a_cap.clone()));
    let beta = snap(&c.beta);
    beta.is_positive().then_some(Candidate { a, alpha, beta })
}

fn neighborhood(cfg: &SearchConfig, c: &Candidate, h: &[Rational; 3], rng: &mut ChaCha8Rng) -> Vec<Candidate> {
    let mut out = Vec::with_capacity(28);
    let offs = [-1i64, 0, 1];
    for da in offs {
        for dal in offs {
            for db in offs {
                if da == 0 && dal == 0 && db == 0 {
                    continue;
                }
                let cand = Candidate {
                    a: &c.a + &(&h[0] * &Rational::integer(da)),
                    alpha: &c.alpha + &(&h[1] * &Rational::integer(dal)),
                    beta: &c.beta + &(&h[2] * &Rational::integer(db)),
                };
                out.extend(clamp(cfg, cand));
            }
        }
    }
    // One jittered point inside the current step box.
    let jit = |rng: &mut ChaCha8Rng, s: &Rational| s * &Rational::frac(rng.gen_range(-1000..=1000), 1000);
    let cand = Candidate {
        a: &c.a + &jit(rng, &h[0]),
        alpha: &c.alpha + &jit(rng, &h[1]),
        beta: &c.beta + &jit(rng, &h[2]),
    };
    out.extend(clamp(cfg, cand));
    out
}

/// Jitter stream for a probe: FNV-1a of the canonical text of ε.
fn stream_id(eps: &Rational) -> u64 {
    eps.to_string().bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Search `(a, α, β)` for a certified witness at pinching gap `eps`.
pub fn feasible(eps: &Rational, cfg: &SearchConfig) -> Result<Probe, SearchError> {
    cfg.validate()?;
    if eps.is_negative() {
        return Err(SearchError::InvalidConfig("ε must be nonnegative".into()));
    }
    let pin = PinchInput::new(cfg.n, eps.clone()).map_err(|e| SearchError::InvalidConfig(e.to_string()))?;
    let x = pinch_x(&pin);
    let ed = eps_data(cfg.n, eps);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream_id(eps));

    let mut pool: Vec<(Candidate, f64, &'static str)> = Vec::new();
    if x.is_positive() {
        let cands = grid_candidates(cfg, &x);
        let scores = score_all(cfg, eps, ed, &cands);
        pool.extend(cands.into_iter().zip(scores).map(|(c, (s, b))| (c, s, b)));
    }
    let mut best = best_index(&pool);
    if let Some(bi) = best {
        let g = Rational::integer(cfg.grid);
        let c0 = &pool[bi].0;
        let eta0 = &x / &c0.a;
        let mut h = [
            &(&cfg.a_cap - &Rational::frac(1, 2)) / &g,
            Rational::one() / g.clone(),
            &eta0 / &g,
        ];
        for _ in 0..cfg.refine_rounds {
            for s in h.iter_mut() {
                *s = &*s / &Rational::integer(2);
            }
            let centre = pool[best.expect("nonempty")].0.clone();
            let local = neighborhood(cfg, &centre, &h, &mut rng);
            let local: Vec<Candidate> = local.into_iter().filter(|c| !pool.iter().any(|(p, _, _)| p == c)).collect();
            let scores = score_all(cfg, eps, ed, &local);
            pool.extend(local.into_iter().zip(scores).map(|(c, (s, b))| (c, s, b)));
            best = best_index(&pool);
        }
    }

    // Highest score first; ties keep insertion order.
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&i, &j| pool[j].1.partial_cmp(&pool[i].1).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
    let threshold = match cfg.strictness {
        Strictness::Strict => 0.0,
        Strictness::AllowSemidefinite => -1e-9,
    };
    let mut certified = 0u64;
    let mut witness = None;
    for &i in order.iter().take(TOP_CANDIDATES) {
        if !(pool[i].1 >= threshold) {
            break;
        }
        let p = param_set(cfg, eps, &pool[i].0);
        certified += 1;
        if certify(&p).map(|c| c.passed()).unwrap_or(false) {
            witness = Some(p);
            break;
        }
    }
    let (binding, score) = match best {
        Some(bi) => (pool[bi].2.to_string(), format!("{:.6e}", pool[bi].1)),
        None => ("C5".to_string(), "-inf".to_string()),
    };
    Ok(Probe {
        eps: eps.clone(),
        feasible: witness.is_some(),
        witness,
        binding,
        score,
        candidates_scored: pool.len() as u64,
        candidates_certified: certified,
    })
}

fn best_index(pool: &[(Candidate, f64, &'static str)]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, (_, s, _)) in pool.iter().enumerate() {
        if s.is_nan() {
            continue;
        }
        match best {
            Some(b) if pool[b].1 >= *s => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Result of the bisection on ε.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frontier {
    pub config: SearchConfig,
    /// Largest probed ε with a certified witness.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_eps: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<ParamSet>,
    pub history: Vec<Probe>,
    /// Pairs `(feasible ε, infeasible ε)` with the feasible one larger.
    pub monotonicity_violations: Vec<(Rational, Rational)>,
}

impl Frontier {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("frontier serializes")
    }

    pub fn summary(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(
            s,
            "search n = {}  ε ∈ [{}, {}]  grid = {}  refine = {}  bisect = {}  strictness = {:?}  theta rule = {}  seed = {}",
            c.n, c.eps_min, c.eps_max, c.grid, c.refine_rounds, c.bisect_steps, c.strictness, c.theta_rule, c.seed
        );
        let _ = writeln!(s, "{:<14} {:<10} {:<10} {:<14} {}", "ε", "feasible", "binding", "score", "witness (a, α, β)");
        for p in &self.history {
            let w = p
                .witness
                .as_ref()
                .map_or_else(|| "—".to_string(), |w| format!("({}, {}, {})", w.a, w.alpha, w.beta));
            let _ = writeln!(s, "{:<14} {:<10} {:<10} {:<14} {}", p.eps.to_string(), p.feasible, p.binding, p.score, w);
        }
        match &self.max_eps {
            Some(e) => {
                let _ = writeln!(s, "max ε = {e} (≈ {})", crate::exact::render_decimal(e, 6));
            }
            None => {
                let _ = writeln!(s, "no feasible ε found");
            }
        }
        for (f, i) in &self.monotonicity_violations {
            let _ = writeln!(s, "non-monotone: feasible at {f} but infeasible at {i}");
        }
        s
    }
}

/// Bisection for the largest certifiable ε in `[eps_min, eps_max]`.
pub fn max_epsilon(cfg: &SearchConfig) -> Result<Frontier, SearchError> {
    cfg.validate()?;
    let mut history = Vec::new();
    let mut best: Option<Probe> = None;
    let mut record = |p: Probe, best: &mut Option<Probe>| {
        if p.feasible && best.as_ref().map_or(true, |b| b.eps < p.eps) {
            *best = Some(p.clone());
        }
        history.push(p);
    };
    if cfg.eps_min == cfg.eps_max {
        let p = feasible(&cfg.eps_min, cfg)?;
        record(p, &mut best);
    } else {
        let (mut lo, mut hi) = (cfg.eps_min.clone(), cfg.eps_max.clone());
        for _ in 0..cfg.bisect_steps {
            let mid = &(&lo + &hi) / &Rational::integer(2);
            let p = feasible(&mid, cfg)?;
            if p.feasible {
                lo = mid;
            } else {
                hi = mid;
            }
            record(p, &mut best);
        }
    }
    let mut violations = Vec::new();
    for f in history.iter().filter(|p| p.feasible) {
        for i in history.iter().filter(|p| !p.feasible) {
            if f.eps > i.eps {
                violations.push((f.eps.clone(), i.eps.clone()));
            }
        }
    }
    Ok(Frontier {
        config: cfg.clone(),
        max_eps: best.as_ref().map(|b| b.eps.clone()),
        witness: best.and_then(|b| b.witness),
        history,
        monotonicity_violations: violations,
    })
}
