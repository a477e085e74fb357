//! The ordered condition pipeline: a [`ParamSet`] goes in, a self-contained
//! [`Certificate`] of exact values and comparisons comes out.

mod params;
pub mod report;
mod smatrix;

pub use params::{CertifyError, KChoice, ParamSet, ThetaRule, MAX_N, MIN_N};
pub use smatrix::{build_s_matrix, SMatrixReport};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constants::{self, ChainConstants, PinchInput};
use crate::exact::{render_decimal, render_quad, Bracket, QuadExt, Rational, Sign, JSON_DIGITS};
use crate::linalg::{self, classify_definiteness, Strictness};
use crate::published::{claim_for, published_set, PublishedClaim, PublishedSet};

pub const TOOL_VERSION: &str = concat!("pinchcert ", env!("CARGO_PKG_VERSION"));

/// An exact scalar as it appears in a certificate: a rational, or a
/// quadratic-field element with a nonzero irrational part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExactValue {
    Rational(Rational),
    Quad(QuadExt),
}

impl ExactValue {
    pub fn to_quad(&self) -> QuadExt {
        match self {
            ExactValue::Rational(r) => QuadExt::rational(r.clone()),
            ExactValue::Quad(q) => q.clone(),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            ExactValue::Rational(r) => Some(r),
            ExactValue::Quad(q) => q.as_rational(),
        }
    }

    pub fn sign(&self) -> Sign {
        self.to_quad().sign()
    }

    pub fn decimal(&self, sig: usize) -> String {
        match self {
            ExactValue::Rational(r) => render_decimal(r, sig).value,
            ExactValue::Quad(q) => render_quad(q, sig).value,
        }
    }

    /// Decimal rendering with an `(exact)` marker when no rounding happened.
    pub fn decimal_marked(&self, sig: usize) -> String {
        match self {
            ExactValue::Rational(r) => {
                let d = render_decimal(r, sig);
                if d.is_exact {
                    format!("{} (exact)", d.value)
                } else {
                    d.value
                }
            }
            ExactValue::Quad(q) => render_quad(q, sig).value,
        }
    }
}

impl From<Rational> for ExactValue {
    fn from(r: Rational) -> Self {
        ExactValue::Rational(r)
    }
}

impl From<QuadExt> for ExactValue {
    fn from(q: QuadExt) -> Self {
        match q.as_rational() {
            Some(r) => ExactValue::Rational(r.clone()),
            None => ExactValue::Quad(q),
        }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactValue::Rational(r) => write!(f, "{r}"),
            ExactValue::Quad(q) => write!(f, "{q}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Gt => ">",
            CmpOp::Ge => "≥",
            CmpOp::Lt => "<",
            CmpOp::Le => "≤",
        }
    }

    /// Whether `lhs op rhs` holds given `sign(lhs − rhs)`.
    pub fn holds(self, diff: Sign) -> bool {
        match self {
            CmpOp::Gt => diff == Sign::Positive,
            CmpOp::Ge => diff != Sign::Negative,
            CmpOp::Lt => diff == Sign::Negative,
            CmpOp::Le => diff != Sign::Positive,
        }
    }
}

/// One exact comparison `lhs op rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub lhs: ExactValue,
    pub op: CmpOp,
    pub rhs: ExactValue,
    pub holds: bool,
}

impl Check {
    pub fn new(label: impl Into<String>, lhs: impl Into<ExactValue>, op: CmpOp, rhs: impl Into<ExactValue>) -> Self {
        let mut c = Check { label: label.into(), lhs: lhs.into(), op, rhs: rhs.into(), holds: false };
        c.holds = c.recompute();
        c
    }

    /// Decide the comparison again from the stored operands.
    pub fn recompute(&self) -> bool {
        let diff = self.lhs.to_quad().try_sub(&self.rhs.to_quad()).expect("operands share a field");
        self.op.holds(diff.sign())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A prerequisite value is undefined because an earlier condition failed.
    NotEvaluated,
    /// Reported but not part of the verdict.
    Info,
    /// Evaluated and reported, but excluded from the verdict by policy.
    Skipped,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotEvaluated => "not evaluated",
            Status::Info => "info",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub id: String,
    pub title: String,
    pub status: Status,
    /// All checks hold (false when not evaluated).
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decimal: Option<String>,
    #[serde(default)]
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub published: Option<PublishedClaim>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ConditionResult {
    fn new(id: &str, title: &str) -> Self {
        ConditionResult {
            id: id.into(),
            title: title.into(),
            status: Status::NotEvaluated,
            pass: false,
            exact: None,
            decimal: None,
            checks: Vec::new(),
            published: None,
            notes: Vec::new(),
        }
    }

    fn with_exact(mut self, v: impl Into<ExactValue>) -> Self {
        let v = v.into();
        self.decimal = Some(v.decimal(JSON_DIGITS));
        self.exact = Some(v);
        self
    }

    fn check(mut self, c: Check) -> Self {
        self.checks.push(c);
        self
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    fn claim(mut self, c: Option<PublishedClaim>) -> Self {
        self.published = c;
        self
    }

    /// Settle `pass` and `status` from the checks.
    fn finish(mut self, policy: Status) -> Self {
        self.pass = !self.checks.is_empty() && self.checks.iter().all(|c| c.holds);
        self.status = match policy {
            Status::Pass | Status::Fail => {
                if self.pass {
                    Status::Pass
                } else {
                    Status::Fail
                }
            }
            other => other,
        };
        self
    }

    fn not_evaluated(id: &str, title: &str, why: &str) -> Self {
        ConditionResult::new(id, title).note(format!("not evaluated: {why}"))
    }

    /// Counts toward a passing verdict.
    pub fn is_ok(&self) -> bool {
        matches!(self.status, Status::Pass | Status::Skipped | Status::Info)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// One named constant of the chain with its exact value (or a rational
/// bracket for transcendental quantities) and any printed reference value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantRow {
    pub symbol: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket: Option<Bracket>,
    pub decimal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub published: Option<PublishedClaim>,
}

impl ConstantRow {
    fn exact(symbol: &str, v: impl Into<ExactValue>, printed: Option<&str>) -> Self {
        let v = v.into();
        let published = printed.map(|p| claim_for(&v.to_quad(), p));
        ConstantRow { symbol: symbol.into(), decimal: v.decimal(JSON_DIGITS), exact: Some(v), bracket: None, published }
    }

    fn bracket(symbol: &str, b: Bracket) -> Self {
        ConstantRow { symbol: symbol.into(), decimal: b.render(JSON_DIGITS).value, exact: None, bracket: Some(b), published: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub tool_version: String,
    pub params: ParamSet,
    pub conditions: Vec<ConditionResult>,
    pub constants: Vec<ConstantRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_matrix: Option<SMatrixReport>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl Certificate {
    pub fn condition(&self, id: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.id == id)
    }

    pub fn constant(&self, symbol: &str) -> Option<&ConstantRow> {
        self.constants.iter().find(|c| c.symbol == symbol)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Why a certificate failed to revalidate.
#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum RevalidationError {
    #[error("{0}: recorded check {1:?} does not reproduce")]
    Check(String, String),
    #[error("{0}: recorded pass flag disagrees with its checks")]
    PassFlag(String),
    #[error("{0}: recorded status disagrees with its checks")]
    Status(String),
    #[error("S matrix witness does not reproduce its classification")]
    SMatrix,
    #[error("recorded verdict disagrees with the conditions")]
    Verdict,
}

/// Re-decide every recorded comparison from the serialized exact operands
/// and confirm the flags, statuses and verdict derived from them.
pub fn revalidate(cert: &Certificate) -> Result<(), RevalidationError> {
    for c in &cert.conditions {
        for ch in &c.checks {
            if ch.recompute() != ch.holds {
                return Err(RevalidationError::Check(c.id.clone(), ch.label.clone()));
            }
        }
        let pass = !c.checks.is_empty() && c.checks.iter().all(|ch| ch.holds);
        if pass != c.pass {
            return Err(RevalidationError::PassFlag(c.id.clone()));
        }
        let consistent = match c.status {
            Status::Pass => pass,
            Status::Fail => !pass,
            Status::NotEvaluated => c.checks.is_empty(),
            Status::Info | Status::Skipped => true,
        };
        if !consistent {
            return Err(RevalidationError::Status(c.id.clone()));
        }
    }
    if let Some(s) = &cert.s_matrix {
        if !s.reproduces() {
            return Err(RevalidationError::SMatrix);
        }
    }
    let ok = cert.conditions.iter().filter(|c| c.id != "C10" && c.id != "C11").all(|c| c.is_ok());
    if ok != cert.passed() {
        return Err(RevalidationError::Verdict);
    }
    let first = cert.conditions.iter().find(|c| !c.is_ok()).map(|c| c.id.clone());
    if first != cert.first_failure {
        return Err(RevalidationError::Verdict);
    }
    Ok(())
}

fn r(n: i64) -> Rational {
    Rational::integer(n)
}

fn half() -> Rational {
    Rational::frac(1, 2)
}

/// Published reference values, when `p` is one of the printed parameter sets
/// (β and the policies may differ; they do not enter the printed decimals).
fn reference_for(p: &ParamSet) -> Option<&'static PublishedSet> {
    let s = published_set(p.n)?;
    let same = p.eps == s.eps() && p.a == s.a() && p.alpha == s.alpha() && p.k == KChoice::Auto;
    same.then_some(s)
}

/// Evaluate every condition of the chain for `p`. No condition
/// short-circuits the others; values that cannot be formed because an
/// earlier condition failed are marked not evaluated.
pub fn certify(p: &ParamSet) -> Result<Certificate, CertifyError> {
    p.validate()?;
    let n = p.n;
    let refs = reference_for(p);
    let pin = PinchInput::new(n, p.eps.clone()).map_err(|e| CertifyError::InvalidParams(e.to_string()))?;
    let printed = |f: fn(&PublishedSet) -> &'static str| refs.map(f);

    let mut chain = ChainConstants {
        delta_sq: constants::delta_sq(&pin),
        lambda_n: constants::lambda_n(&pin),
        pinch_x: constants::pinch_x(&pin),
        b: None,
        base: None,
        coeff: None,
        tau: None,
        eta: None,
        k: None,
        theta: None,
        gamma: None,
        vol_bound_pi2: None,
        growth_coeff: None,
        growth_const: None,
    };
    let mut conds = Vec::with_capacity(11);

    // C1
    conds.push(
        ConditionResult::new("C1", "pinching gap admissible: 0 < ε < 1")
            .with_exact(p.eps.clone())
            .check(Check::new("ε > 0", p.eps.clone(), CmpOp::Gt, r(0)))
            .check(Check::new("ε < 1", p.eps.clone(), CmpOp::Lt, r(1)))
            .finish(Status::Pass),
    );

    // C2
    let lam = chain.lambda_n.clone();
    conds.push(
        ConditionResult::new("C2", "one-end improvement constant Λ > 0")
            .with_exact(lam.clone())
            .check(Check::new("Λ > 0", lam.clone(), CmpOp::Gt, r(0)))
            .claim(printed(|s| s.lambda).map(|t| claim_for(&lam, t)))
            .finish(Status::Pass),
    );

    // C3
    let two_a = &p.a * &r(2);
    let literal = p.a >= &p.alpha * &r(2);
    conds.push(
        ConditionResult::new("C3", "shape hypotheses: a ≥ 1/2, 2a ≥ α, α ≤ 1")
            .with_exact(p.a.clone())
            .check(Check::new("a ≥ 1/2", p.a.clone(), CmpOp::Ge, half()))
            .check(Check::new("2a ≥ α", two_a, CmpOp::Ge, p.alpha.clone()))
            .check(Check::new("α ≤ 1", p.alpha.clone(), CmpOp::Le, r(1)))
            .note(format!(
                "the stronger literal form a ≥ 2α {}",
                if literal { "also holds" } else { "does not hold" }
            ))
            .finish(Status::Pass),
    );

    // C4
    let (bmat, cbar) = constants::build_b_matrix(n, &p.a, &p.alpha).map_err(|e| CertifyError::InvalidParams(e.to_string()))?;
    let bstat = classify_definiteness(&bmat, Strictness::Strict).expect("rational matrix");
    let mut c4 = ConditionResult::new("C4", "B strictly positive definite").with_exact(bstat.det().clone());
    for (i, m) in bstat.leading_minors.iter().enumerate() {
        c4 = c4.check(Check::new(format!("Δ{} (B) > 0", i + 1), m.clone(), CmpOp::Gt, r(0)));
    }
    let c4 = c4.note(format!("classification: {:?}", bstat.classification)).finish(Status::Pass);
    let b_ok = c4.pass;
    conds.push(c4);
    if b_ok {
        let x = linalg::inverse_apply(&bmat, &cbar).expect("B is nonsingular");
        chain.b = Some(&linalg::dot(&cbar, &x) / &r(4));
    }

    // C5
    let xval = chain.pinch_x.clone();
    conds.push(
        ConditionResult::new("C5", "pinch factor X > 0")
            .with_exact(xval.clone())
            .check(Check::new("X > 0", xval.clone(), CmpOp::Gt, r(0)))
            .finish(Status::Pass),
    );
    chain.eta = Some(&xval / &p.a);

    // C6
    let te = chain.b.as_ref().map(|b| constants::tau_eta_from(n, &xval, b, &p.a, &p.alpha));
    let c6_title = "spectral constants τ > 0 and η > 0";
    let c6 = match &te {
        Some(te) => ConditionResult::new("C6", c6_title)
            .with_exact(te.tau.clone())
            .check(Check::new("τ > 0", te.tau.clone(), CmpOp::Gt, r(0)))
            .check(Check::new("η > 0", te.eta.clone(), CmpOp::Gt, r(0)))
            .claim(printed(|s| s.tau).map(|t| claim_for(&QuadExt::rational(te.tau.clone()), t)))
            .note(format!(
                "|dr|² coefficient {} is {}",
                render_decimal(&te.coeff, 12),
                if te.coeff.is_negative() { "negative, so τ = base + coeff" } else { "nonnegative, so τ = base" }
            ))
            .finish(Status::Pass),
        None => ConditionResult::not_evaluated("C6", c6_title, "dependency failed (C4: b undefined)"),
    };
    conds.push(c6);
    if let Some(te) = &te {
        chain.base = Some(te.base.clone());
        chain.coeff = Some(te.coeff.clone());
        chain.tau = Some(te.tau.clone());
    }

    // C7
    let k = p.effective_k();
    chain.k = k.clone();
    let c7_title = "weight exponent 0 < k < 4";
    let c7 = match &k {
        Some(k) => {
            let c = ConditionResult::new("C7", c7_title)
                .with_exact(k.clone())
                .check(Check::new("k > 0", k.clone(), CmpOp::Gt, r(0)))
                .check(Check::new("k < 4", k.clone(), CmpOp::Lt, r(4)));
            let c = if p.k == KChoice::Auto { c.note("k = a/X = 1/η") } else { c };
            c.finish(Status::Pass)
        }
        None => ConditionResult::not_evaluated("C7", c7_title, "dependency failed (C5: X = 0, k = a/X undefined)"),
    };
    conds.push(c7);

    // C8
    let c8_title = match p.strictness {
        Strictness::Strict => "S matrix positive definite (strict)",
        Strictness::AllowSemidefinite => "S matrix positive semidefinite",
    };
    let s_report = match &k {
        Some(k) if k.is_positive() => Some(SMatrixReport::build(n, &p.alpha, k, &p.beta)),
        _ => None,
    };
    let c8 = match &s_report {
        Some(s) => {
            let mut c = ConditionResult::new("C8", c8_title).with_exact(s.det_bareiss.clone());
            match p.strictness {
                Strictness::Strict => {
                    for (i, m) in s.leading_minors.iter().enumerate() {
                        c = c.check(Check::new(format!("Δ{} (S) > 0", i + 1), m.clone(), CmpOp::Gt, r(0)));
                    }
                }
                Strictness::AllowSemidefinite => {
                    let dim = s.char_poly.len() - 1;
                    for (i, ci) in s.char_poly.iter().enumerate() {
                        let signed = if (dim - i) % 2 == 0 { ci.to_quad() } else { -&ci.to_quad() };
                        c = c.check(Check::new(format!("(−1)^{} c{} ≥ 0", dim - i, i), signed, CmpOp::Ge, r(0)));
                    }
                }
            }
            c.note(format!("classification: {:?}", s.classification))
                .note(format!("strict verdict: {}", if s.strict_accepts { "pass" } else { "fail" }))
                .note(format!("semidefinite verdict: {}", if s.semidefinite_accepts { "pass" } else { "fail" }))
                .finish(Status::Pass)
        }
        None => ConditionResult::not_evaluated("C8", c8_title, "dependency failed (C7: k undefined or not positive)"),
    };
    conds.push(c8);

    // C9
    let theta_bound = Rational::new((n - 2) as i64, (n - 3) as i64).expect("n ≥ 4");
    let eta = chain.eta.clone().expect("set above");
    let policy = match p.theta_rule {
        ThetaRule::Displayed => Status::Pass,
        ThetaRule::Skip => Status::Skipped,
    };
    let c9_title = "Laplacian weight θ ≤ (n−2)/(n−3)";
    let c9 = match constants::theta(&eta, &p.alpha) {
        Ok(th) => {
            chain.theta = Some(th.clone());
            let claim = printed(|s| s.theta).map(|t| claim_for(&QuadExt::rational(th.clone()), t));
            let mut c = ConditionResult::new("C9", c9_title)
                .with_exact(th.clone())
                .check(Check::new("θ ≤ (n−2)/(n−3)", th, CmpOp::Le, theta_bound.clone()));
            if let Some(cl) = &claim {
                let printed_val: Rational = cl.printed.parse().expect("printed literal");
                let printed_ok = printed_val <= theta_bound;
                c = c.note(format!(
                    "printed value {} gives {}",
                    cl.printed,
                    if printed_ok { "θ ≤ bound: pass" } else { "θ ≤ bound: fail" }
                ));
            }
            if p.theta_rule == ThetaRule::Skip {
                c = c.note("excluded from the verdict by theta rule 'skip'");
            }
            c.claim(claim).finish(policy)
        }
        Err(_) => {
            let four_eta = &eta * &r(4);
            let c = ConditionResult::new("C9", c9_title)
                .check(Check::new("4η > 1", four_eta, CmpOp::Gt, r(1)))
                .note("θ undefined: 4η ≤ 1");
            c.finish(policy)
        }
    };
    conds.push(c9);

    // C10, C11 and γ
    let gamma = match (&chain.tau, &chain.eta) {
        (Some(t), Some(e)) if t.is_positive() && e.is_positive() => constants::gamma(n, t, &p.alpha, e).ok(),
        _ => None,
    };
    chain.gamma = gamma.clone();
    let c10_title = "volume bound within the printed target";
    let c11_title = "growth constant C(F) for ‖F‖ = min F";
    match gamma.as_ref().filter(|_| constants::sphere_volume_pi2(n).is_some()) {
        Some(g) => {
            let vol = constants::volume_bound(n, g).expect("γ > 0 and table entry present");
            chain.vol_bound_pi2 = Some(vol.bound_pi2.clone());
            let target = vol.target_pi2.clone().expect("table entry present");
            let lhs = vol.certificate_lhs.clone().expect("table entry present");
            conds.push(
                ConditionResult::new("C10", c10_title)
                    .with_exact(lhs.clone())
                    .check(Check::new("cleared-power inequality ≥ 1", lhs, CmpOp::Ge, r(1)))
                    .note(format!(
                        "bound ≈ {} π², target {} π²",
                        vol.bound_pi2.render(12),
                        target
                    ))
                    .finish(Status::Info),
            );
            let one = Bracket::point(Rational::one());
            let g = constants::growth_const(n, g, &one, &one).expect("positive inputs");
            chain.growth_coeff = Some(g.coeff.clone());
            chain.growth_const = Some(g.value.clone());
            let folded = g.folded_coeff.clone().expect("table entry present");
            conds.push(
                ConditionResult::new("C11", c11_title)
                    .with_exact(folded.clone())
                    .check(Check::new("coefficient upper end ≤ folded T/n", g.coeff.hi.clone(), CmpOp::Le, folded.clone()))
                    .note(format!(
                        "C(F) ≈ {} π² e^{{{}π}} ≈ {}; folded form {} π² e^{{{}π}}",
                        g.coeff.render(12),
                        g.exp_factor,
                        g.value.render(12),
                        folded,
                        g.exp_factor
                    ))
                    .finish(Status::Info),
            );
        }
        None => {
            let why = if gamma.is_none() {
                "dependency failed (C6: γ needs τ > 0)"
            } else {
                "no sphere-volume table for this n"
            };
            let mut c10 = ConditionResult::not_evaluated("C10", c10_title, why);
            c10.status = Status::Info;
            let mut c11 = ConditionResult::not_evaluated("C11", c11_title, why);
            c11.status = Status::Info;
            conds.push(c10);
            conds.push(c11);
        }
    }

    let constants_rows = constant_rows(&chain, refs);
    let first_failure = conds.iter().find(|c| !c.is_ok()).map(|c| c.id.clone());
    let verdict = if first_failure.is_none() { Verdict::Pass } else { Verdict::Fail };
    Ok(Certificate {
        tool_version: TOOL_VERSION.to_string(),
        params: p.clone(),
        conditions: conds,
        constants: constants_rows,
        s_matrix: s_report,
        verdict,
        first_failure,
    })
}

fn constant_rows(c: &ChainConstants, refs: Option<&PublishedSet>) -> Vec<ConstantRow> {
    let pr = |f: fn(&PublishedSet) -> &'static str| refs.map(f);
    let mut rows = vec![
        ConstantRow::exact("delta_sq", c.delta_sq.clone(), None),
        ConstantRow::exact("lambda", c.lambda_n.clone(), pr(|s| s.lambda)),
        ConstantRow::exact("pinch_x", c.pinch_x.clone(), None),
    ];
    let opt = [
        ("b", &c.b, pr(|s| s.b)),
        ("base", &c.base, None),
        ("coeff", &c.coeff, pr(|s| s.coeff)),
        ("tau", &c.tau, pr(|s| s.tau)),
        ("eta", &c.eta, pr(|s| s.eta)),
        ("k", &c.k, None),
        ("theta", &c.theta, pr(|s| s.theta)),
        ("gamma", &c.gamma, None),
    ];
    for (sym, v, printed) in opt {
        if let Some(v) = v {
            rows.push(ConstantRow::exact(sym, v.clone(), printed));
        }
    }
    for (sym, v) in [
        ("vol_bound_pi2", &c.vol_bound_pi2),
        ("growth_coeff", &c.growth_coeff),
        ("growth_const", &c.growth_const),
    ] {
        if let Some(v) = v {
            rows.push(ConstantRow::bracket(sym, v.clone()));
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn published_n4_passes_with_singular_s() {
        let c = certify(&ParamSet::published(4).unwrap()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass, "{:#?}", c.conditions);
        let c8 = c.condition("C8").unwrap();
        assert_eq!(c8.exact, Some(ExactValue::Rational(q("0"))));
        assert_eq!(c.s_matrix.as_ref().unwrap().classification, crate::Definiteness::PositiveSemidefiniteSingular);
        assert_eq!(c.condition("C10").unwrap().pass, true);
        assert_eq!(c.constant("b").unwrap().exact, Some(ExactValue::Rational(q("3"))));
        revalidate(&c).unwrap();
    }

    #[test]
    fn published_n4_strict_fails_at_c8() {
        let mut p = ParamSet::published(4).unwrap();
        p.strictness = Strictness::Strict;
        let c = certify(&p).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        assert_eq!(c.first_failure.as_deref(), Some("C8"));
        revalidate(&c).unwrap();
    }

    #[test]
    fn published_n5_fails_only_theta() {
        let c = certify(&ParamSet::published(5).unwrap()).unwrap();
        for id in ["C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8"] {
            assert_eq!(c.condition(id).unwrap().status, Status::Pass, "{id}");
        }
        assert_eq!(c.first_failure.as_deref(), Some("C9"));
        let th = c.condition("C9").unwrap();
        assert!(!th.published.as_ref().unwrap().matches);
        let mut p = ParamSet::published(5).unwrap();
        p.theta_rule = ThetaRule::Skip;
        let c = certify(&p).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert_eq!(c.condition("C9").unwrap().status, Status::Skipped);
        revalidate(&c).unwrap();
    }

    #[test]
    fn b_failure_propagates() {
        let mut p = ParamSet::published(4).unwrap();
        p.a = q("1/10");
        let c = certify(&p).unwrap();
        assert_eq!(c.condition("C4").unwrap().status, Status::Fail);
        assert_eq!(c.condition("C6").unwrap().status, Status::NotEvaluated);
        assert!(c.condition("C6").unwrap().notes[0].starts_with("not evaluated: dependency failed"));
        assert_eq!(c.condition("C10").unwrap().status, Status::Info);
        assert!(c.constant("b").is_none());
        revalidate(&c).unwrap();
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let c = certify(&ParamSet::published(5).unwrap()).unwrap();
        let s = c.to_json();
        let back = Certificate::from_json(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), s);
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let c = certify(&ParamSet::published(4).unwrap()).unwrap();
        let mut bad = c.clone();
        bad.conditions[5].checks[0].lhs = ExactValue::Rational(q("-1"));
        assert!(revalidate(&bad).is_err());
        let mut bad = c;
        bad.verdict = Verdict::Fail;
        assert!(revalidate(&bad).is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = ParamSet::published(4).unwrap();
        p.n = 3;
        assert!(matches!(certify(&p), Err(CertifyError::InvalidParams(_))));
        let mut p = ParamSet::published(4).unwrap();
        p.beta = q("0");
        assert!(certify(&p).is_err());
    }

    #[test]
    fn negative_pinch_factor_skips_s_matrix() {
        let mut p = ParamSet::published(4).unwrap();
        p.eps = q("1");
        let c = certify(&p).unwrap();
        assert_eq!(c.condition("C5").unwrap().status, Status::Fail);
        assert_eq!(c.condition("C7").unwrap().status, Status::Fail);
        assert_eq!(c.condition("C8").unwrap().status, Status::NotEvaluated);
        assert!(c.s_matrix.is_none());
        revalidate(&c).unwrap();
    }
}
