//! Browser bindings for the certificate checker.
//!
//! The plain functions take rational parameters as text (`p/q` or exact
//! decimals, empty for the printed default of `n`) and return JSON or
//! markdown documents. The `wasm_bindgen` wrappers only translate errors.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use pinchcert::certifier::report::{render, Format};
use pinchcert::certifier::{certify, KChoice, ParamSet, SMatrixReport, ThetaRule};
use pinchcert::exact::render_decimal;
use pinchcert::{Rational, Strictness};

/// Largest number of β samples a sweep may request.
pub const MAX_SWEEP_STEPS: u32 = 400;

fn field(text: &str, default: Option<&Rational>, name: &str, n: u32) -> Result<Rational, String> {
    let t = text.trim();
    if t.is_empty() {
        return default.cloned().ok_or_else(|| format!("{name} is required for n = {n}"));
    }
    t.parse::<Rational>().map_err(|e| format!("{name}: {e}"))
}

pub fn params(n: u32, eps: &str, a: &str, alpha: &str, beta: &str, strict: bool, skip_theta: bool) -> Result<ParamSet, String> {
    let base = ParamSet::published(n).ok();
    let d = base.as_ref();
    Ok(ParamSet {
        n,
        eps: field(eps, d.map(|b| &b.eps), "ε", n)?,
        a: field(a, d.map(|b| &b.a), "a", n)?,
        alpha: field(alpha, d.map(|b| &b.alpha), "α", n)?,
        k: KChoice::Auto,
        beta: field(beta, d.map(|b| &b.beta), "β", n)?,
        strictness: if strict { Strictness::Strict } else { Strictness::AllowSemidefinite },
        theta_rule: if skip_theta { ThetaRule::Skip } else { ThetaRule::Displayed },
    })
}

/// Certificate for one parameter set as `json` or `markdown`.
#[allow(clippy::too_many_arguments)]
pub fn certify_document(
    n: u32,
    eps: &str,
    a: &str,
    alpha: &str,
    beta: &str,
    strict: bool,
    skip_theta: bool,
    format: &str,
) -> Result<String, String> {
    let format = match format {
        "json" => Format::Json,
        "markdown" | "md" => Format::Markdown,
        "text" => Format::Text,
        other => return Err(format!("unknown format {other:?}")),
    };
    let c = certify(&params(n, eps, a, alpha, beta, strict, skip_theta)?).map_err(|e| e.to_string())?;
    Ok(render(&c, format))
}

/// The chain constants with printed values and match flags, as a JSON array.
pub fn constants_table(n: u32, eps: &str, a: &str, alpha: &str, beta: &str) -> Result<String, String> {
    let c = certify(&params(n, eps, a, alpha, beta, false, false)?).map_err(|e| e.to_string())?;
    serde_json::to_string(&c.constants).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct SweepPoint {
    pub beta: String,
    pub beta_f64: f64,
    pub det: String,
    pub det_f64: f64,
    pub classification: String,
}

/// `det S` and its definiteness class along `steps + 1` equally spaced
/// values of β in `[beta_lo, beta_hi]`, with `k = a/X`.
pub fn beta_sweep_points(
    n: u32,
    eps: &str,
    a: &str,
    alpha: &str,
    beta_lo: &str,
    beta_hi: &str,
    steps: u32,
) -> Result<Vec<SweepPoint>, String> {
    if steps == 0 || steps > MAX_SWEEP_STEPS {
        return Err(format!("steps must lie in [1, {MAX_SWEEP_STEPS}]"));
    }
    let p = params(n, eps, a, alpha, "1", false, false)?;
    p.validate().map_err(|e| e.to_string())?;
    let k = p.effective_k().filter(Rational::is_positive).ok_or("k = a/X is not positive for these parameters")?;
    let lo = field(beta_lo, None, "β min", n)?;
    let hi = field(beta_hi, None, "β max", n)?;
    if lo > hi {
        return Err("β range is not ordered".into());
    }
    let width = &(&hi - &lo) / &Rational::integer(steps);
    (0..=steps)
        .map(|i| {
            let beta = &lo + &(&width * &Rational::integer(i));
            let s = SMatrixReport::build(n, &p.alpha, &k, &beta);
            let det = s.det_bareiss.as_rational().cloned().ok_or("det S is irrational")?;
            Ok(SweepPoint {
                beta_f64: beta.to_f64(),
                beta: beta.to_string(),
                det_f64: det.to_f64(),
                det: render_decimal(&det, 12).value,
                classification: format!("{:?}", s.classification),
            })
        })
        .collect()
}

pub fn beta_sweep(n: u32, eps: &str, a: &str, alpha: &str, beta_lo: &str, beta_hi: &str, steps: u32) -> Result<String, String> {
    let pts = beta_sweep_points(n, eps, a, alpha, beta_lo, beta_hi, steps)?;
    serde_json::to_string(&pts).map_err(|e| e.to_string())
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen(js_name = certify)]
pub fn certify_js(
    n: u32,
    eps: &str,
    a: &str,
    alpha: &str,
    beta: &str,
    strict: bool,
    skip_theta: bool,
    format: &str,
) -> Result<String, JsValue> {
    certify_document(n, eps, a, alpha, beta, strict, skip_theta, format).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = constantsTable)]
pub fn constants_table_js(n: u32, eps: &str, a: &str, alpha: &str, beta: &str) -> Result<String, JsValue> {
    constants_table(n, eps, a, alpha, beta).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = betaSweep)]
pub fn beta_sweep_js(n: u32, eps: &str, a: &str, alpha: &str, beta_lo: &str, beta_hi: &str, steps: u32) -> Result<String, JsValue> {
    beta_sweep(n, eps, a, alpha, beta_lo, beta_hi, steps).map_err(|e| JsValue::from_str(&e))
}
