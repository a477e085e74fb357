//! Independent cross-checks of the formula layer: a brute-force supremum
//! for the mean-curvature lemma, the completion-of-squares identity, and
//! exact definiteness against a floating-point eigen-solver.
//!
//! Random sampling is split into fixed-size chunks; chunk `i` draws from a
//! ChaCha stream seeded by `(seed, i)`, and chunk results are merged in
//! index order, so reports do not depend on the thread count.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{delta_sq, PinchInput};
use crate::exact::{render_decimal, Rational, JSON_DIGITS};
use crate::linalg::{self, classify_definiteness, Definiteness, LinalgError, Strictness, SymMatrix};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const CHUNK: u64 = 8192;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("B is not positive definite ({0:?})")]
    BNotPositiveDefinite(Definiteness),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub check: String,
    /// Largest value observed (exact when the maximum is attained exactly).
    pub observed_max: String,
    pub bound: Rational,
    pub samples: u64,
    pub seed: u64,
    pub pass: bool,
    pub details: BTreeMap<String, String>,
}

impl OracleReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Run `f(rng, count)` over `samples` split into chunks and return the
/// per-chunk results in chunk order.
fn sample_chunks<T: Send>(samples: u64, seed: u64, f: impl Fn(&mut ChaCha8Rng, u64) -> T + Sync) -> Vec<T> {
    let chunks = samples.div_ceil(CHUNK);
    let run = |i: u64| {
        let count = CHUNK.min(samples - i * CHUNK);
        f(&mut chunk_rng(seed, i), count)
    };
    #[cfg(feature = "parallel")]
    {
        (0..chunks).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks).map(run).collect()
    }
}

/// Diagonal data of the anisotropic shape operator at a point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrincipalData {
    pub a_vec: Vec<Rational>,
    pub kappa_vec: Vec<Rational>,
}

/// `H_F = Σ aᵢκᵢ`.
pub fn hf_mean_curvature(d: &PrincipalData) -> Result<Rational, OracleError> {
    if d.a_vec.len() != d.kappa_vec.len() {
        return Err(OracleError::InvalidInput("a and κ lengths differ".into()));
    }
    Ok(linalg::dot(&d.a_vec, &d.kappa_vec))
}

/// `g(a) = n − (Σaᵢ)²/Σaᵢ²`: the supremum of `H²/|A|²` over `κ ≠ 0` with `Σaᵢκᵢ = 0`.
pub fn constrained_ratio_sup(a: &[Rational]) -> Rational {
    let s: Rational = a.iter().sum();
    let s2: Rational = a.iter().map(Rational::square).sum();
    &Rational::integer(a.len() as i64) - &(&s.square() / &s2)
}

fn g_f64(a: &[f64]) -> f64 {
    let s: f64 = a.iter().sum();
    let s2: f64 = a.iter().map(|x| x * x).sum();
    a.len() as f64 - s * s / s2
}

/// Exact maximum of `g` over the vertices of `[1, 1+ε]ⁿ`. `g` is symmetric,
/// so a vertex is determined by how many coordinates sit at `1+ε`.
pub fn vertex_max(n: u32, eps: &Rational) -> (Rational, u32) {
    let hi = eps + &Rational::one();
    (0..=n)
        .map(|m| {
            let a: Vec<Rational> = (0..n).map(|i| if i < m { hi.clone() } else { Rational::one() }).collect();
            (constrained_ratio_sup(&a), m)
        })
        .fold(None, |best: Option<(Rational, u32)>, (g, m)| match best {
            Some((ref bg, _)) if *bg >= g => best,
            _ => Some((g, m)),
        })
        .expect("n ≥ 1")
}

/// Supremum of `H²/|A|²` for `F`-minimal principal data under pinching `ε`,
/// compared exactly with `δ²`.
///
/// The exact part evaluates `g` at every box vertex. The sampled part draws
/// interior `a` and random `κ` projected onto `a⊥`, confirming that sampled
/// ratios never exceed `g(a)` and that `g(a)` never exceeds the vertex
/// maximum by more than `10⁻¹²`.
pub fn lemma_ratio_sup(n: u32, eps: &Rational, samples: u64, seed: u64) -> Result<OracleReport, OracleError> {
    let pin = PinchInput::new(n, eps.clone()).map_err(|e| OracleError::InvalidInput(e.to_string()))?;
    if eps.is_negative() {
        return Err(OracleError::InvalidInput("ε must be nonnegative".into()));
    }
    let bound = delta_sq(&pin);
    let (vmax, at) = vertex_max(n, eps);
    let vmax_f = vmax.to_f64();
    let e = eps.to_f64();
    let nn = n as usize;

    // (max g(a), max sampled ratio, max ratio − g(a))
    let parts = sample_chunks(samples, seed, |rng, count| {
        let mut a = vec![0.0; nn];
        let mut k = vec![0.0; nn];
        let (mut gmax, mut rmax, mut excess) = (f64::MIN, f64::MIN, f64::MIN);
        for _ in 0..count {
            for x in a.iter_mut() {
                *x = 1.0 + e * rng.gen::<f64>();
            }
            for x in k.iter_mut() {
                *x = rng.gen::<f64>() * 2.0 - 1.0;
            }
            let aa: f64 = a.iter().map(|x| x * x).sum();
            let ak: f64 = a.iter().zip(&k).map(|(x, y)| x * y).sum();
            for (ki, ai) in k.iter_mut().zip(&a) {
                *ki -= ak / aa * ai;
            }
            let h: f64 = k.iter().sum();
            let norm: f64 = k.iter().map(|x| x * x).sum();
            let g = g_f64(&a);
            gmax = gmax.max(g);
            if norm > 1e-300 {
                let ratio = h * h / norm;
                rmax = rmax.max(ratio);
                excess = excess.max(ratio - g);
            }
        }
        (gmax, rmax, excess)
    });
    let (gmax, rmax, excess) = parts
        .into_iter()
        .fold((f64::MIN, f64::MIN, f64::MIN), |(a, b, c), (x, y, z)| (a.max(x), b.max(y), c.max(z)));

    let tol = 1e-12;
    let samples_ok = samples == 0 || (gmax <= vmax_f + tol && excess <= tol);
    let exact_ok = vmax <= bound;
    let mut details = BTreeMap::new();
    details.insert("vertex_max".into(), vmax.to_string());
    details.insert("vertex_max_decimal".into(), render_decimal(&vmax, JSON_DIGITS).value);
    details.insert("vertex_coordinates_at_upper".into(), at.to_string());
    details.insert("bound_decimal".into(), render_decimal(&bound, JSON_DIGITS).value);
    details.insert("vertex_max_le_bound".into(), exact_ok.to_string());
    if samples > 0 {
        details.insert("sampled_g_max".into(), format!("{gmax:.17e}"));
        details.insert("sampled_ratio_max".into(), format!("{rmax:.17e}"));
        details.insert("sampled_excess_over_g".into(), format!("{excess:.3e}"));
        details.insert("sampled_excess_over_vertex_max".into(), format!("{:.3e}", gmax - vmax_f));
    }
    details.insert("samples_within_tolerance".into(), samples_ok.to_string());
    Ok(OracleReport {
        check: "lemma-ratio".into(),
        observed_max: vmax.to_string(),
        bound,
        samples,
        seed,
        pass: exact_ok && samples_ok,
        details,
    })
}

fn random_small_rational(rng: &mut impl Rng) -> Rational {
    let p: i64 = rng.gen_range(-40..=40);
    let q: i64 = rng.gen_range(1..=16);
    Rational::frac(p, q)
}

/// Completion of squares: for strictly positive definite `B`,
/// `min_q qᵀBq + Cᵀq = −¼CᵀB⁻¹C`, attained at `q* = −½B⁻¹C`.
///
/// The identity is checked exactly at `q*`; sampled rational `q` confirm
/// `qᵀBq + Cᵀq − min ≥ 0` exactly.
pub fn quadform_min_check(
    b: &SymMatrix<Rational>,
    c: &[Rational],
    samples: u64,
    seed: u64,
) -> Result<OracleReport, OracleError> {
    if c.len() != b.dim() {
        return Err(OracleError::InvalidInput("C length differs from dim B".into()));
    }
    let status = classify_definiteness(b, Strictness::Strict)?;
    if !status.accepted {
        return Err(OracleError::BNotPositiveDefinite(status.classification));
    }
    let value = |q: &[Rational]| -> Rational {
        &b.quadratic_form(q).expect("dims agree") + &linalg::dot(c, q)
    };
    let binv_c = linalg::inverse_apply(b, c)?;
    let min = &linalg::dot(c, &binv_c) / &Rational::integer(-4);
    let q_star: Vec<Rational> = binv_c.iter().map(|x| x / &Rational::integer(-2)).collect();
    let at_star = value(&q_star);
    let identity = at_star == min;

    let dim = b.dim();
    let parts = sample_chunks(samples, seed, |rng, count| {
        let mut worst: Option<Rational> = None;
        let mut ok = true;
        for _ in 0..count {
            let q: Vec<Rational> = (0..dim).map(|_| random_small_rational(rng)).collect();
            let gap = &value(&q) - &min;
            ok &= !gap.is_negative();
            worst = Some(match worst {
                Some(w) if w <= gap => w,
                _ => gap,
            });
        }
        (ok, worst)
    });
    let mut all_ok = true;
    let mut min_gap: Option<Rational> = None;
    for (ok, w) in parts {
        all_ok &= ok;
        if let Some(w) = w {
            min_gap = Some(match min_gap {
                Some(m) if m <= w => m,
                _ => w,
            });
        }
    }
    let mut details = BTreeMap::new();
    details.insert("minimum".into(), min.to_string());
    details.insert("minimizer".into(), q_star.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));
    details.insert("value_at_minimizer".into(), at_star.to_string());
    details.insert("identity_holds".into(), identity.to_string());
    details.insert("samples_respect_bound".into(), all_ok.to_string());
    if let Some(g) = &min_gap {
        details.insert("smallest_sampled_gap".into(), g.to_string());
    }
    Ok(OracleReport {
        check: "quadform".into(),
        observed_max: (-&at_star).to_string(),
        bound: -&min,
        samples,
        seed,
        pass: identity && all_ok,
        details,
    })
}

/// Eigenvalue-sign classification of a symmetric matrix in floating point.
pub fn float_classification(m: &SymMatrix<Rational>) -> (Definiteness, f64) {
    let d = m.dim();
    let dense = DMatrix::from_fn(d, d, |i, j| m.get(i, j).to_f64());
    let eig = dense.symmetric_eigen();
    let tol = 1e-9;
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    let mut min_abs = f64::INFINITY;
    for &l in eig.eigenvalues.iter() {
        min_abs = min_abs.min(l.abs());
        if l > tol {
            pos += 1;
        } else if l < -tol {
            neg += 1;
        } else {
            zero += 1;
        }
    }
    let class = match (pos, neg, zero) {
        (_, 0, 0) => Definiteness::PositiveDefinite,
        (0, _, 0) => Definiteness::NegativeDefinite,
        (_, 0, _) => Definiteness::PositiveSemidefiniteSingular,
        (0, _, _) => Definiteness::NegativeSemidefinite,
        _ => Definiteness::Indefinite,
    };
    (class, min_abs)
}

/// Random symmetric matrices (dims 2–5, entries `p/q`, `|p| ≤ 100`,
/// `q ≤ 10`) classified exactly and by eigenvalues. A disagreement is
/// allowed only when the smallest eigenvalue magnitude is below `10⁻⁶`.
pub fn pd_cross_check(trials: u64, seed: u64) -> Result<OracleReport, OracleError> {
    if trials == 0 {
        return Err(OracleError::InvalidInput("trials must be positive".into()));
    }
    let window = 1e-6;
    // Every fourth matrix is a Gram matrix, so semidefinite and definite
    // cases occur alongside the mostly indefinite uniform draws.
    let parts = sample_chunks(trials, seed, |rng, count| {
        let mut tally: BTreeMap<String, u64> = BTreeMap::new();
        let (mut bad, mut exempt) = (0u64, 0u64);
        for t in 0..count {
            let dim = rng.gen_range(2..=5usize);
            let entry = |rng: &mut ChaCha8Rng| Rational::frac(rng.gen_range(-100..=100), rng.gen_range(1..=10));
            let m = if t % 4 == 3 {
                let rank = rng.gen_range(1..=dim);
                let v: Vec<Vec<Rational>> = (0..rank).map(|_| (0..dim).map(|_| entry(rng)).collect()).collect();
                SymMatrix::from_fn(dim, |i, j| (0..rank).map(|r| &v[r][i] * &v[r][j]).sum()).expect("dim ≤ 5")
            } else {
                let up: Vec<Rational> = (0..dim * (dim + 1) / 2).map(|_| entry(rng)).collect();
                SymMatrix::from_upper(dim, up).expect("dim ≤ 5")
            };
            let exact = classify_definiteness(&m, Strictness::Strict).expect("rational").classification;
            let (float, min_abs) = float_classification(&m);
            *tally.entry(format!("{exact:?}")).or_default() += 1;
            if exact != float {
                if min_abs < window {
                    exempt += 1;
                } else {
                    bad += 1;
                }
            }
        }
        (tally, bad, exempt)
    });
    let mut tally: BTreeMap<String, u64> = BTreeMap::new();
    let (mut bad, mut exempt) = (0u64, 0u64);
    for (t, b, e) in parts {
        for (k, v) in t {
            *tally.entry(k).or_default() += v;
        }
        bad += b;
        exempt += e;
    }
    let mut details = BTreeMap::new();
    details.insert("disallowed_mismatches".into(), bad.to_string());
    details.insert("exempt_mismatches".into(), exempt.to_string());
    for (k, v) in tally {
        details.insert(format!("count_{k}"), v.to_string());
    }
    Ok(OracleReport {
        check: "pd-check".into(),
        observed_max: bad.to_string(),
        bound: Rational::zero(),
        samples: trials,
        seed,
        pass: bad == 0,
        details,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::build_b_matrix;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn hf_examples() {
        let d = |a: &[&str], k: &[&str]| PrincipalData {
            a_vec: a.iter().map(|s| q(s)).collect(),
            kappa_vec: k.iter().map(|s| q(s)).collect(),
        };
        assert_eq!(hf_mean_curvature(&d(&["1", "1", "1", "1"], &["1", "-1", "2", "-2"])).unwrap(), q("0"));
        assert_eq!(hf_mean_curvature(&d(&["23/20", "1", "1", "1"], &["60/23", "-1", "-1", "-1"])).unwrap(), q("0"));
        assert_eq!(hf_mean_curvature(&d(&["1", "1", "23/20", "23/20"], &["1", "1", "1", "1"])).unwrap(), q("43/10"));
    }

    #[test]
    fn vertex_max_examples() {
        assert_eq!(vertex_max(4, &q("3/20")), (q("18/929"), 2));
        assert_eq!(vertex_max(4, &q("0")).0, q("0"));
    }

    #[test]
    fn small_lemma_run() {
        let r = lemma_ratio_sup(4, &q("3/20"), 20_000, 7).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.observed_max, "18/929");
        assert_eq!(r.bound, q("27/529"));
        let r0 = lemma_ratio_sup(4, &q("0"), 1000, 7).unwrap();
        assert!(r0.pass);
    }

    #[test]
    fn quadform_n4() {
        let (b, c) = build_b_matrix(4, &q("1"), &q("1")).unwrap();
        let neg: Vec<Rational> = c.iter().map(|x| -x).collect();
        let r = quadform_min_check(&b, &neg, 500, 1).unwrap();
        assert!(r.pass);
        assert_eq!(r.details["minimum"], "-3");
        assert_eq!(r.details["minimizer"], "1, 1, 0, 0");
        let id = SymMatrix::identity(3).unwrap();
        let r = quadform_min_check(&id, &[q("0"), q("0"), q("0")], 100, 1).unwrap();
        assert_eq!(r.details["minimum"], "0");
    }

    #[test]
    fn pd_small_run() {
        let r = pd_cross_check(400, 42).unwrap();
        assert!(r.pass, "{r:?}");
        let d = SymMatrix::diagonal(&[q("1"), q("0")]).unwrap();
        let (fc, min_abs) = float_classification(&d);
        assert_eq!(fc, Definiteness::PositiveSemidefiniteSingular);
        assert!(min_abs < 1e-6);
    }

    #[test]
    fn reports_are_reproducible() {
        let a = lemma_ratio_sup(5, &q("1/1000"), 10_000, 3).unwrap();
        let b = lemma_ratio_sup(5, &q("1/1000"), 10_000, 3).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
