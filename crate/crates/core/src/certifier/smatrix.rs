use serde::{Deserialize, Serialize};

use super::ExactValue;
use crate::exact::{QuadExt, Rational};
use crate::linalg::{self, classify_definiteness, Definiteness, Strictness, SymMatrix};

/// The 3×3 matrix of the bubble's second-variation quadratic form, over
/// `ℚ(√((n−2)/(n−1)))`:
///
/// ```text
/// s11 = 1/(n−1) + α/(n−1) − α/(n−1)² + 1/k − 1
/// s12 = (α/2)·√((n−2)/(n−1))·(1 − 2/(n−1))
/// s13 = 1/2 − 1/k
/// s22 = 1 − (n−2)α/(n−1)
/// s23 = 0
/// s33 = 1/k − β
/// ```
///
/// Because `s23 = 0` the irrational `s12` only enters minors squared, so
/// every leading minor is rational.
pub fn build_s_matrix(n: u32, alpha: &Rational, k: &Rational, beta: &Rational) -> SymMatrix<QuadExt> {
    assert!(n >= 4, "S matrix needs n ≥ 4");
    assert!(k.is_positive(), "S matrix needs k > 0");
    let one = Rational::one();
    let n1 = Rational::integer(n - 1);
    let n2 = Rational::integer(n - 2);
    let inv_k = k.recip().expect("k > 0");
    let s11 = &(&(&(&one / &n1) + &(alpha / &n1)) - &(alpha / &n1.square())) + &(&inv_k - &one);
    let root = QuadExt::sqrt(&(&n2 / &n1)).expect("positive ratio");
    let s12_scale = &(alpha / &Rational::integer(2)) * &(&one - &(&Rational::integer(2) / &n1));
    let s12 = &root * &QuadExt::rational(s12_scale);
    let s13 = &Rational::frac(1, 2) - &inv_k;
    let s22 = &one - &(&(&n2 * alpha) / &n1);
    let s33 = &inv_k - beta;
    let q = QuadExt::rational;
    SymMatrix::from_upper(3, vec![q(s11), s12, q(s13), q(s22), q(Rational::zero()), q(s33)]).expect("3×3")
}

/// The S matrix with its exact definiteness witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SMatrixReport {
    pub k: Rational,
    pub beta: Rational,
    pub matrix: SymMatrix<QuadExt>,
    pub classification: Definiteness,
    pub leading_minors: Vec<ExactValue>,
    /// `c₀ … c₃` of `det(xI − S)`.
    pub char_poly: Vec<ExactValue>,
    pub det_bareiss: ExactValue,
    pub det_cofactor: ExactValue,
    pub strict_accepts: bool,
    pub semidefinite_accepts: bool,
}

impl SMatrixReport {
    pub fn build(n: u32, alpha: &Rational, k: &Rational, beta: &Rational) -> Self {
        let m = build_s_matrix(n, alpha, k, beta);
        let status = classify_definiteness(&m, Strictness::Strict).expect("single radicand");
        let det_cofactor = linalg::det_cofactor(&m).expect("single radicand");
        let semidefinite_accepts = matches!(
            status.classification,
            Definiteness::PositiveDefinite | Definiteness::PositiveSemidefiniteSingular
        );
        SMatrixReport {
            k: k.clone(),
            beta: beta.clone(),
            classification: status.classification,
            det_bareiss: status.det().clone().into(),
            det_cofactor: det_cofactor.into(),
            leading_minors: status.leading_minors.into_iter().map(Into::into).collect(),
            char_poly: status.char_poly.into_iter().map(Into::into).collect(),
            strict_accepts: status.accepted,
            semidefinite_accepts,
            matrix: m,
        }
    }

    /// Recompute every derived field from the stored matrix.
    pub fn reproduces(&self) -> bool {
        if self.matrix.dim() != 3 {
            return false;
        }
        let status = match classify_definiteness(&self.matrix, Strictness::Strict) {
            Ok(s) => s,
            Err(_) => return false,
        };
        let det_cofactor = match linalg::det_cofactor(&self.matrix) {
            Ok(d) => d,
            Err(_) => return false,
        };
        let minors: Vec<ExactValue> = status.leading_minors.iter().cloned().map(Into::into).collect();
        let poly: Vec<ExactValue> = status.char_poly.iter().cloned().map(Into::into).collect();
        status.classification == self.classification
            && minors == self.leading_minors
            && poly == self.char_poly
            && ExactValue::from(det_cofactor) == self.det_cofactor
            && self.det_bareiss == self.det_cofactor
            && status.accepted == self.strict_accepts
    }

    /// Whether all leading minors and characteristic-polynomial coefficients
    /// are rational.
    pub fn invariants_rational(&self) -> bool {
        self.leading_minors.iter().chain(&self.char_poly).all(|v| v.as_rational().is_some())
    }
}
