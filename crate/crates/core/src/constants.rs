//! Closed-form constants of the proof chain as exact functions of the
//! dimension `n`, the pinching gap `ε` and the shape parameters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{exp_bracket, pi_bracket, Bracket, ExactError, QuadExt, Rational};
use crate::linalg::{self, classify_definiteness, Definiteness, LinalgError, Strictness, SymMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstantsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("B is not positive definite ({0:?})")]
    BNotPositiveDefinite(Definiteness),
    #[error("4η ≤ 1: θ is undefined or negative")]
    EtaTooSmall,
    #[error("γ must be positive")]
    NonPositiveGamma,
    #[error("min F must be positive")]
    NonPositiveMinF,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Dimension of the hypersurface and its pinching gap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinchInput {
    pub n: u32,
    pub eps: Rational,
}

impl PinchInput {
    /// Accepts any `n ≥ 3` and `ε > −1`; the admissible range `0 < ε < 1` is
    /// a certificate condition, not a construction error.
    pub fn new(n: u32, eps: Rational) -> Result<Self, ConstantsError> {
        if n < 3 {
            return Err(ConstantsError::InvalidInput(format!("n = {n} < 3")));
        }
        if eps <= Rational::integer(-1) {
            return Err(ConstantsError::InvalidInput(format!("1 + ε = {} ≤ 0", &eps + &Rational::one())));
        }
        Ok(PinchInput { n, eps })
    }

    fn n_rat(&self) -> Rational {
        Rational::integer(self.n)
    }

    fn one_plus_eps(&self) -> Rational {
        &self.eps + &Rational::one()
    }
}

/// `δ² = (n−1)ε²/(1+ε)²`, the constant in `H² ≤ δ²|A|²`.
pub fn delta_sq(p: &PinchInput) -> Rational {
    let n1 = Rational::integer(p.n - 1);
    &(&n1 * &p.eps.square()) / &p.one_plus_eps().square()
}

/// `Λ = 1/(1+ε) − (n−1)/n·(1 + (n−2)/√(n−1)·ε/(1+ε))` in `ℚ(√(n−1))`.
pub fn lambda_n(p: &PinchInput) -> QuadExt {
    let n = p.n_rat();
    let n1 = Rational::integer(p.n - 1);
    let n2 = Rational::integer(p.n - 2);
    let ope = p.one_plus_eps();
    let ratio = &p.eps / &ope;
    // (n−2)/√(n−1) = (n−2)·√(n−1)/(n−1)
    let root = QuadExt::sqrt(&n1).expect("n − 1 > 0");
    let frac = QuadExt::rational(&n2 / &n1);
    let inner = &(&frac * &root) * &QuadExt::rational(ratio);
    let paren = &QuadExt::rational(Rational::one()) + &inner;
    let scaled = &QuadExt::rational(&n1 / &n) * &paren;
    &QuadExt::rational(ope.recip().expect("1 + ε ≠ 0")) - &scaled
}

/// The pinch factor `X = (1+ε − (n−2)(n−1)ε²)/(1+ε)²` multiplying `r²|A|²`.
pub fn pinch_x(p: &PinchInput) -> Rational {
    let c = Rational::integer((p.n - 2) * (p.n - 1));
    let ope = p.one_plus_eps();
    &(&ope - &(&c * &p.eps.square())) / &ope.square()
}

/// The quadratic-form matrix `B` and the vector `C̄` of the completion-of-squares step.
pub fn build_b_matrix(n: u32, a: &Rational, alpha: &Rational) -> Result<(SymMatrix<Rational>, Vec<Rational>), ConstantsError> {
    if n < 3 {
        return Err(ConstantsError::InvalidInput(format!("n = {n} < 3")));
    }
    let half = Rational::frac(1, 2);
    let half_alpha = alpha * &half;
    let b = SymMatrix::from_fn(n as usize, |i, j| {
        if i == j {
            a.clone()
        } else if i == 0 {
            half.clone()
        } else if i == 1 {
            half_alpha.clone()
        } else {
            Rational::zero()
        }
    })?;
    let nr = Rational::integer(n);
    let mut cbar = vec![&nr - &Rational::one(), alpha * &(&nr - &Rational::integer(2)) + Rational::one()];
    cbar.extend(std::iter::repeat(alpha + &Rational::one()).take(n as usize - 2));
    Ok((b, cbar))
}

/// `b = ¼ C̄ᵀ B⁻¹ C̄`; requires `B` strictly positive definite.
pub fn b_const(n: u32, a: &Rational, alpha: &Rational) -> Result<Rational, ConstantsError> {
    let (b, cbar) = build_b_matrix(n, a, alpha)?;
    let status = classify_definiteness(&b, Strictness::Strict)?;
    if !status.accepted {
        return Err(ConstantsError::BNotPositiveDefinite(status.classification));
    }
    let x = linalg::inverse_apply(&b, &cbar)?;
    Ok(&linalg::dot(&cbar, &x) / &Rational::integer(4))
}

/// Spectral constants of the conformally changed stability inequality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauEta {
    pub tau: Rational,
    pub eta: Rational,
    /// Constant part of the lower bound before the `|dr|²` drop.
    pub base: Rational,
    /// Coefficient of `|dr|²`.
    pub coeff: Rational,
}

/// `τ` and `η` given `X` and `b`:
/// `base = X·(2(n−1+α(n−2)) − b/a) − (4n+1)(n−2)/8`,
/// `coeff = X·(b − (2n−2+α(n−2)))/a + (n−2)(n+2)/4`,
/// `τ = base + min(0, coeff)` (minimum of `base + coeff·t` over `t ∈ [0,1]`),
/// `η = X/a`.
pub fn tau_eta_from(n: u32, x: &Rational, b: &Rational, a: &Rational, alpha: &Rational) -> TauEta {
    let nr = Rational::integer(n);
    let n2 = &nr - &Rational::integer(2);
    let one = Rational::one();
    let two = Rational::integer(2);
    let an2 = alpha * &n2;
    let base_inner = &(&two * &(&(&nr - &one) + &an2)) - &(b / a);
    let base = &(x * &base_inner) - &(&Rational::integer((4 * n as i64 + 1) * (n as i64 - 2)) / &Rational::integer(8));
    let coeff_inner = b - &(&(&(&two * &nr) - &two) + &an2);
    let coeff = &(&(x * &coeff_inner) / a) + &(&Rational::integer((n as i64 - 2) * (n as i64 + 2)) / &Rational::integer(4));
    let tau = if coeff.is_negative() { &base + &coeff } else { base.clone() };
    TauEta { tau, eta: x / a, base, coeff }
}

pub fn tau_eta(p: &PinchInput, a: &Rational, alpha: &Rational) -> Result<TauEta, ConstantsError> {
    if !a.is_positive() {
        return Err(ConstantsError::InvalidInput("a must be positive".into()));
    }
    let b = b_const(p.n, a, alpha)?;
    Ok(tau_eta_from(p.n, &pinch_x(p), &b, a, alpha))
}

/// `θ = 4η/((4η−1)α)`, the Laplacian weight of the Jacobi inequality on the bubble.
pub fn theta(eta: &Rational, alpha: &Rational) -> Result<Rational, ConstantsError> {
    let four_eta = eta * &Rational::integer(4);
    if four_eta <= Rational::one() {
        return Err(ConstantsError::EtaTooSmall);
    }
    if !alpha.is_positive() {
        return Err(ConstantsError::InvalidInput("α must be positive".into()));
    }
    Ok(&four_eta / &(&(&four_eta - &Rational::one()) * alpha))
}

/// `γ = τ/(2(n−2)αη)`, the base of the volume bound.
pub fn gamma(n: u32, tau: &Rational, alpha: &Rational, eta: &Rational) -> Result<Rational, ConstantsError> {
    let denom = &(&Rational::integer(2 * (n as i64 - 2)) * alpha) * eta;
    if denom.is_zero() {
        return Err(ConstantsError::InvalidInput("2(n−2)αη = 0".into()));
    }
    Ok(tau / &denom)
}

pub fn theta_gamma(n: u32, eta: &Rational, alpha: &Rational, tau: &Rational) -> Result<(Rational, Rational), ConstantsError> {
    Ok((theta(eta, alpha)?, gamma(n, tau, alpha, eta)?))
}

/// `Vol(S^{n−1})` in units of `π²`, for the dimensions where it is a
/// rational multiple of `π²`.
pub fn sphere_volume_pi2(n: u32) -> Option<Rational> {
    match n {
        4 => Some(Rational::integer(2)),
        5 => Some(Rational::frac(8, 3)),
        _ => None,
    }
}

/// Printed volume bound `T` (bound ≤ T·π²) for n = 4 and n = 5.
pub fn volume_target_pi2(n: u32) -> Option<Rational> {
    match n {
        4 => Some(Rational::integer(72)),
        5 => Some(Rational::integer(84)),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeBound {
    /// `γ^{−(n−1)/2}·Vol(S^{n−1})/π²`.
    pub bound_pi2: Bracket,
    pub target_pi2: Option<Rational>,
    /// Rational quantity that is `≥ 1` exactly when the bound is at most the target.
    pub certificate_lhs: Option<Rational>,
    pub holds: Option<bool>,
}

/// Volume bound of the bubble and its exact comparison with the printed target.
///
/// The fractional power is cleared: `γ^{−(n−1)/2}v ≤ T` iff
/// `γ^{(n−1)/2}·T/v ≥ 1` (n−1 even) or `γ^{n−1}·(T/v)² ≥ 1` (n−1 odd).
pub fn volume_bound(n: u32, gamma: &Rational) -> Result<VolumeBound, ConstantsError> {
    if !gamma.is_positive() {
        return Err(ConstantsError::NonPositiveGamma);
    }
    let v = sphere_volume_pi2(n)
        .ok_or_else(|| ConstantsError::InvalidInput(format!("no sphere volume table for n = {n}")))?;
    let bound_pi2 = Bracket::point(gamma.clone()).pow_half(-(n as i32 - 1))?.scale(&v);
    let target_pi2 = volume_target_pi2(n);
    let certificate_lhs = target_pi2.as_ref().map(|t| {
        let ratio = t / &v;
        if (n - 1) % 2 == 0 {
            &gamma.pow(((n - 1) / 2) as i32) * &ratio
        } else {
            &gamma.pow((n - 1) as i32) * &ratio.square()
        }
    });
    let holds = certificate_lhs.as_ref().map(|l| l >= &Rational::one());
    Ok(VolumeBound { bound_pi2, target_pi2, certificate_lhs, holds })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthConstant {
    /// The exponent `10n` in `e^{10nπ}`.
    pub exp_factor: u32,
    /// `C(F)` in units of `π²e^{10nπ}`.
    pub coeff: Bracket,
    /// Full value of `C(F)`.
    pub value: Bracket,
    /// Folded coefficient obtained from the rounded volume target, `T/n`.
    pub folded_coeff: Option<Rational>,
}

/// `C(F) = e^{10nπ}·γ^{−(n−1)/2}·Vol(S^{n−1})·‖F‖_{C¹}/(n·min F)`.
pub fn growth_const(n: u32, gamma: &Rational, norm_f: &Bracket, min_f: &Bracket) -> Result<GrowthConstant, ConstantsError> {
    if !min_f.is_positive() {
        return Err(ConstantsError::NonPositiveMinF);
    }
    let vol = volume_bound(n, gamma)?;
    let ratio = norm_f.div(min_f)?;
    let coeff = vol.bound_pi2.mul(&ratio).scale(&Rational::frac(1, n as i64));
    let pi = pi_bracket();
    let exp_arg = pi.scale(&Rational::integer(10 * n as i64));
    let value = coeff.mul(&pi.mul(&pi)).mul(&exp_bracket(&exp_arg));
    let folded_coeff = vol.target_pi2.map(|t| &t / &Rational::integer(n));
    Ok(GrowthConstant { exp_factor: 10 * n, coeff, value, folded_coeff })
}

/// Every constant of the chain for one parameter choice. Entries whose
/// prerequisites fail are `None`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConstants {
    pub delta_sq: Rational,
    pub lambda_n: QuadExt,
    pub pinch_x: Rational,
    pub b: Option<Rational>,
    pub base: Option<Rational>,
    pub coeff: Option<Rational>,
    pub tau: Option<Rational>,
    pub eta: Option<Rational>,
    pub k: Option<Rational>,
    pub theta: Option<Rational>,
    pub gamma: Option<Rational>,
    pub vol_bound_pi2: Option<Bracket>,
    pub growth_coeff: Option<Bracket>,
    pub growth_const: Option<Bracket>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn pin(n: u32, e: &str) -> PinchInput {
        PinchInput::new(n, r(e)).unwrap()
    }

    #[test]
    fn delta_sq_examples() {
        assert_eq!(delta_sq(&pin(4, "3/20")), r("27/529"));
        assert_eq!(delta_sq(&pin(5, "0")), r("0"));
        assert_eq!(delta_sq(&pin(5, "1/1000")), r("4/1002001"));
    }

    #[test]
    fn lambda_examples() {
        let l5 = lambda_n(&pin(5, "1/1000"));
        assert!(l5.is_rational());
        assert_eq!(l5.coef(), &r("0"));
        assert_eq!(l5.rat(), &r("198/1001"));
        let l4 = lambda_n(&pin(4, "3/20"));
        assert_eq!(l4, QuadExt::new(r("11/92"), r("-3/46"), 3).unwrap());
        assert_eq!(l4.sign(), crate::Sign::Positive);
        assert_eq!(lambda_n(&pin(4, "0")), QuadExt::rational(r("1/4")));
    }

    #[test]
    fn pinch_x_examples() {
        assert_eq!(pinch_x(&pin(4, "3/20")), r("406/529"));
        assert_eq!(pinch_x(&pin(5, "1/1000")), r("1000988/1002001"));
        assert_eq!(pinch_x(&pin(4, "0")), r("1"));
    }

    #[test]
    fn b_matrix_examples() {
        let (b, c) = build_b_matrix(4, &r("1"), &r("1")).unwrap();
        assert_eq!(c, vec![r("3"), r("3"), r("2"), r("2")]);
        assert_eq!(b.get(0, 3), &r("1/2"));
        assert_eq!(b.get(1, 3), &r("1/2"));
        assert_eq!(b.get(2, 3), &r("0"));
        let (_, c) = build_b_matrix(5, &r("28/25"), &r("3/4")).unwrap();
        assert_eq!(c, vec![r("4"), r("13/4"), r("7/4"), r("7/4"), r("7/4")]);
        let (b, c) = build_b_matrix(4, &r("1"), &r("0")).unwrap();
        assert_eq!(c, vec![r("3"), r("1"), r("1"), r("1")]);
        assert_eq!(b.get(1, 2), &r("0"));
        assert_eq!(b.get(0, 2), &r("1/2"));
    }

    #[test]
    fn b_const_examples() {
        assert_eq!(b_const(4, &r("1"), &r("1")).unwrap(), r("3"));
        let b5 = b_const(5, &r("28/25"), &r("3/4")).unwrap();
        assert_eq!(b5, r("405925/93732"));
        // n=3, a=1, α=0: B = [[1,½,½],[½,1,0],[½,0,1]], C̄ = (2,1,1);
        // B⁻¹C̄ = (2,0,0) so b = ¼·4 = 1.
        assert_eq!(b_const(3, &r("1"), &r("0")).unwrap(), r("1"));
        assert!(matches!(b_const(4, &r("1/10"), &r("1")), Err(ConstantsError::BNotPositiveDefinite(_))));
    }

    #[test]
    fn tau_eta_n4() {
        let te = tau_eta(&pin(4, "3/20"), &r("1"), &r("1")).unwrap();
        assert_eq!(te.tau, r("603/2116"));
        assert_eq!(te.eta, r("406/529"));
        assert_eq!(te.coeff, r("-443/529"));
        // 7X − 17/4 and 3 − 5X
        let x = r("406/529");
        assert_eq!(te.base, &(&r("7") * &x) - &r("17/4"));
        assert_eq!(te.coeff, &r("3") - &(&r("5") * &x));
    }

    #[test]
    fn tau_eta_n5_matches_closed_forms() {
        let p = pin(5, "1/1000");
        let te = tau_eta(&p, &r("28/25"), &r("3/4")).unwrap();
        let y = pinch_x(&p);
        assert_eq!(te.tau, &(&r("375/112") * &y) - &r("21/8"));
        assert_eq!(te.eta, &r("25/28") * &y);
        assert!(te.coeff.is_negative());
    }

    #[test]
    fn zero_pinch_improves_tau() {
        let t0 = tau_eta(&pin(4, "0"), &r("1"), &r("1")).unwrap();
        let t1 = tau_eta(&pin(4, "3/20"), &r("1"), &r("1")).unwrap();
        assert!(t0.tau > t1.tau);
        assert_eq!(t0.eta, r("1"));
    }

    #[test]
    fn theta_gamma_examples() {
        let (th, g) = theta_gamma(4, &r("406/529"), &r("1"), &r("603/2116")).unwrap();
        assert_eq!(th, r("1624/1095"));
        assert_eq!(g, r("603/6496"));
        assert_eq!(theta(&r("1/4"), &r("1")), Err(ConstantsError::EtaTooSmall));
    }

    #[test]
    fn volume_examples() {
        let v4 = volume_bound(4, &r("603/6496")).unwrap();
        assert_eq!(v4.holds, Some(true));
        assert_eq!(v4.certificate_lhs, Some(&r("603/6496").pow(3) * &r("1296")));
        let mid = v4.bound_pi2.midpoint().to_f64();
        assert!((mid - 70.7168735).abs() < 1e-6);
        let unit = volume_bound(4, &r("1")).unwrap();
        assert_eq!(unit.bound_pi2, Bracket::point(r("2")));
        assert_eq!(volume_bound(4, &r("0")).unwrap_err(), ConstantsError::NonPositiveGamma);
    }

    #[test]
    fn growth_examples() {
        let one = Bracket::point(r("1"));
        let g = growth_const(4, &r("603/6496"), &one, &one).unwrap();
        assert_eq!(g.folded_coeff, Some(r("18")));
        assert!((g.coeff.midpoint().to_f64() - 70.7168735 / 4.0).abs() < 1e-6);
        // constant F: the ratio cancels
        let three = Bracket::point(r("3"));
        let g3 = growth_const(4, &r("603/6496"), &three, &three).unwrap();
        assert_eq!(g3.coeff, g.coeff);
        assert_eq!(
            growth_const(4, &r("1"), &one, &Bracket::point(r("0"))).unwrap_err(),
            ConstantsError::NonPositiveMinF
        );
    }
}
