//! Exact symmetric-matrix algebra over [`Rational`] or [`QuadExt`].

use std::fmt::Debug;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{ExactError, QuadExt, Rational, Sign};

/// Hard cap on matrix dimension.
pub const MAX_DIM: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix entries use different radicands ({0} and {1})")]
    MixedRadicands(u64, u64),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension {0} outside 1..={MAX_DIM}")]
    BadDimension(usize),
    #[error("vector length {got} does not match dimension {dim}")]
    LengthMismatch { dim: usize, got: usize },
    #[error("upper triangle has {got} entries, expected {expected}")]
    BadEntryCount { expected: usize, got: usize },
}

impl From<ExactError> for LinalgError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::MixedRadicands(a, b) => LinalgError::MixedRadicands(a, b),
            _ => LinalgError::SingularMatrix,
        }
    }
}

/// Field operations the matrix routines need. Implemented for exact scalars
/// only; mixing radicands is rejected before any arithmetic runs.
pub trait Scalar: Clone + Debug + PartialEq + Serialize + DeserializeOwned + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: Rational) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    /// Exact division by a nonzero value.
    fn divided(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn sign(&self) -> Sign;
    fn is_zero(&self) -> bool {
        self.sign() == Sign::Zero
    }
    /// Radicand of the irrational part, if any.
    fn radicand(&self) -> Option<u64>;
    fn to_f64(&self) -> f64;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn divided(&self, o: &Self) -> Self {
        self / o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn sign(&self) -> Sign {
        Rational::sign(self)
    }
    fn radicand(&self) -> Option<u64> {
        None
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
}

impl Scalar for QuadExt {
    fn zero() -> Self {
        QuadExt::rational(Rational::zero())
    }
    fn one() -> Self {
        QuadExt::rational(Rational::one())
    }
    fn from_rational(r: Rational) -> Self {
        QuadExt::rational(r)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn divided(&self, o: &Self) -> Self {
        self.try_div(o).expect("division by zero or mixed radicands")
    }
    fn negated(&self) -> Self {
        -self
    }
    fn sign(&self) -> Sign {
        QuadExt::sign(self)
    }
    fn radicand(&self) -> Option<u64> {
        (!self.is_rational()).then_some(QuadExt::radicand(self))
    }
    fn to_f64(&self) -> f64 {
        QuadExt::to_f64(self)
    }
}

/// Dense symmetric matrix; only the upper triangle is stored (row-major).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
#[serde(try_from = "SymRepr<T>")]
pub struct SymMatrix<T: Scalar> {
    dim: usize,
    upper: Vec<T>,
}

impl<T: Scalar + Eq> Eq for SymMatrix<T> {}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
struct SymRepr<T: Scalar> {
    dim: usize,
    upper: Vec<T>,
}

impl<T: Scalar> TryFrom<SymRepr<T>> for SymMatrix<T> {
    type Error = LinalgError;
    fn try_from(r: SymRepr<T>) -> Result<Self, Self::Error> {
        SymMatrix::from_upper(r.dim, r.upper)
    }
}

fn tri_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

impl<T: Scalar> SymMatrix<T> {
    pub fn from_upper(dim: usize, upper: Vec<T>) -> Result<Self, LinalgError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(LinalgError::BadDimension(dim));
        }
        if upper.len() != tri_len(dim) {
            return Err(LinalgError::BadEntryCount { expected: tri_len(dim), got: upper.len() });
        }
        let m = SymMatrix { dim, upper };
        m.radicand()?;
        Ok(m)
    }

    /// Builds from an entry function evaluated on the upper triangle.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> T) -> Result<Self, LinalgError> {
        let mut upper = Vec::with_capacity(tri_len(dim));
        for i in 0..dim {
            for j in i..dim {
                upper.push(f(i, j));
            }
        }
        Self::from_upper(dim, upper)
    }

    pub fn identity(dim: usize) -> Result<Self, LinalgError> {
        Self::from_fn(dim, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(diag: &[T]) -> Result<Self, LinalgError> {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i].clone() } else { T::zero() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.dim - i * (i + 1) / 2 + j
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.upper[self.index(i, j)]
    }

    /// Common radicand of all irrational entries.
    pub fn radicand(&self) -> Result<Option<u64>, LinalgError> {
        let mut found: Option<u64> = None;
        for d in self.upper.iter().filter_map(Scalar::radicand) {
            match found {
                None => found = Some(d),
                Some(f) if f == d => {}
                Some(f) => return Err(LinalgError::MixedRadicands(f, d)),
            }
        }
        Ok(found)
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j).clone()).collect()).collect()
    }

    /// Leading `k×k` block.
    pub fn leading(&self, k: usize) -> SymMatrix<T> {
        SymMatrix::from_fn(k, |i, j| self.get(i, j).clone()).expect("sub-block of a valid matrix")
    }

    pub fn apply(&self, v: &[T]) -> Result<Vec<T>, LinalgError> {
        self.check_len(v)?;
        Ok((0..self.dim)
            .map(|i| {
                (0..self.dim).fold(T::zero(), |acc, j| acc.plus(&self.get(i, j).times(&v[j])))
            })
            .collect())
    }

    /// `vᵀ M v`.
    pub fn quadratic_form(&self, v: &[T]) -> Result<T, LinalgError> {
        let mv = self.apply(v)?;
        Ok(dot(v, &mv))
    }

    fn check_len(&self, v: &[T]) -> Result<(), LinalgError> {
        if v.len() != self.dim {
            return Err(LinalgError::LengthMismatch { dim: self.dim, got: v.len() });
        }
        Ok(())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SymMatrix<U> {
        SymMatrix { dim: self.dim, upper: self.upper.iter().map(f).collect() }
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc.plus(&x.times(y)))
}

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
pub fn det<T: Scalar>(m: &SymMatrix<T>) -> Result<T, LinalgError> {
    m.radicand()?;
    Ok(bareiss(m.to_dense()))
}

fn bareiss<T: Scalar>(mut a: Vec<Vec<T>>) -> T {
    let n = a.len();
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    negate = !negate;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].times(&a[k][k]).minus(&a[i][k].times(&a[k][j]));
                a[i][j] = num.divided(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        d.negated()
    } else {
        d
    }
}

/// Determinant by Laplace expansion along the first row. Exponential in the
/// dimension; kept as an independent cross-check for small matrices.
pub fn det_cofactor<T: Scalar>(m: &SymMatrix<T>) -> Result<T, LinalgError> {
    m.radicand()?;
    Ok(laplace(&m.to_dense()))
}

fn laplace<T: Scalar>(a: &[Vec<T>]) -> T {
    let n = a.len();
    match n {
        0 => T::one(),
        1 => a[0][0].clone(),
        _ => {
            let mut acc = T::zero();
            for col in 0..n {
                if a[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<T>> = a[1..]
                    .iter()
                    .map(|row| {
                        row.iter().enumerate().filter(|&(j, _)| j != col).map(|(_, x)| x.clone()).collect()
                    })
                    .collect();
                let term = a[0][col].times(&laplace(&minor));
                acc = if col % 2 == 0 { acc.plus(&term) } else { acc.minus(&term) };
            }
            acc
        }
    }
}

/// Leading principal minors `Δ₁ … Δₙ`.
pub fn leading_minors<T: Scalar>(m: &SymMatrix<T>) -> Result<Vec<T>, LinalgError> {
    m.radicand()?;
    Ok((1..=m.dim()).map(|k| bareiss(m.leading(k).to_dense())).collect())
}

/// Coefficients `c₀ … cₙ` of `det(xI − M) = Σ cᵢ xⁱ` (Faddeev–LeVerrier).
pub fn char_poly<T: Scalar>(m: &SymMatrix<T>) -> Result<Vec<T>, LinalgError> {
    m.radicand()?;
    let n = m.dim();
    let a = m.to_dense();
    let mut coeffs = vec![T::zero(); n + 1];
    coeffs[n] = T::one();
    let mut mk: Vec<Vec<T>> = vec![vec![T::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        let mut next = matmul(&a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] = row[i].plus(&coeffs[n - k + 1]);
        }
        let am = matmul(&a, &next);
        let trace = (0..n).fold(T::zero(), |acc, i| acc.plus(&am[i][i]));
        let inv_k = T::from_rational(Rational::frac(1, k as i64));
        coeffs[n - k] = trace.times(&inv_k).negated();
        mk = next;
    }
    Ok(coeffs)
}

fn matmul<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(T::zero(), |acc, k| acc.plus(&a[i][k].times(&b[k][j]))))
                .collect()
        })
        .collect()
}

/// Solves `M x = v` exactly and verifies `M x = v` before returning.
pub fn inverse_apply<T: Scalar>(m: &SymMatrix<T>, v: &[T]) -> Result<Vec<T>, LinalgError> {
    m.radicand()?;
    m.check_len(v)?;
    let n = m.dim();
    let mut a = m.to_dense();
    for (row, rhs) in a.iter_mut().zip(v) {
        row.push(rhs.clone());
    }
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(LinalgError::SingularMatrix)?;
        a.swap(k, p);
        let pivot = a[k][k].clone();
        for j in k..=n {
            a[k][j] = a[k][j].divided(&pivot);
        }
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k].clone();
                for j in k..=n {
                    let t = f.times(&a[k][j]);
                    a[i][j] = a[i][j].minus(&t);
                }
            }
        }
    }
    let x: Vec<T> = a.into_iter().map(|row| row[n].clone()).collect();
    let back = m.apply(&x)?;
    assert_eq!(back, v, "back-substitution mismatch in exact solve");
    Ok(x)
}

/// Whether semidefinite results are accepted or strict definiteness is required.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    Strict,
    #[default]
    AllowSemidefinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefiniteSingular,
    Indefinite,
    NegativeSemidefinite,
    NegativeDefinite,
}

/// Exact definiteness verdict with the data it was derived from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct PdStatus<T: Scalar> {
    pub classification: Definiteness,
    pub strictness: Strictness,
    /// Whether the classification is accepted under `strictness`.
    pub accepted: bool,
    pub leading_minors: Vec<T>,
    /// `c₀ … cₙ` of `det(xI − M)`.
    pub char_poly: Vec<T>,
}

impl<T: Scalar> PdStatus<T> {
    pub fn det(&self) -> &T {
        self.leading_minors.last().expect("nonempty")
    }

    /// Re-derive the classification from the recorded witness data.
    pub fn rederive(&self) -> Definiteness {
        classify_from(&self.leading_minors, &self.char_poly)
    }
}

/// Semidefiniteness from coefficient signs: for symmetric `M` every root of
/// `det(xI − M)` is real, so `M ⪰ 0` iff `(−1)^(n−i)·cᵢ ≥ 0` for all `i`.
pub fn psd_by_char_poly<T: Scalar>(coeffs: &[T]) -> bool {
    let n = coeffs.len() - 1;
    coeffs.iter().enumerate().all(|(i, c)| {
        let s = c.sign();
        if (n - i) % 2 == 0 {
            s != Sign::Negative
        } else {
            s != Sign::Positive
        }
    })
}

fn nsd_by_char_poly<T: Scalar>(coeffs: &[T]) -> bool {
    coeffs.iter().all(|c| c.sign() != Sign::Negative)
}

fn classify_from<T: Scalar>(minors: &[T], coeffs: &[T]) -> Definiteness {
    let n = minors.len();
    // Sylvester: Δₖ > 0 for all k.
    if minors.iter().all(|d| d.sign() == Sign::Positive) {
        return Definiteness::PositiveDefinite;
    }
    // Negative definite: (−1)ᵏ Δₖ > 0.
    let nd = minors.iter().enumerate().all(|(k, d)| {
        let want = if (k + 1) % 2 == 0 { Sign::Positive } else { Sign::Negative };
        d.sign() == want
    });
    if nd {
        return Definiteness::NegativeDefinite;
    }
    let singular = minors[n - 1].is_zero();
    if singular && psd_by_char_poly(coeffs) {
        Definiteness::PositiveSemidefiniteSingular
    } else if singular && nsd_by_char_poly(coeffs) {
        Definiteness::NegativeSemidefinite
    } else {
        Definiteness::Indefinite
    }
}

/// Exact definiteness classification (Sylvester for the definite cases,
/// characteristic-polynomial signs for the semidefinite ones).
pub fn classify_definiteness<T: Scalar>(
    m: &SymMatrix<T>,
    strictness: Strictness,
) -> Result<PdStatus<T>, LinalgError> {
    let leading_minors = leading_minors(m)?;
    let char_poly = char_poly(m)?;
    let classification = classify_from(&leading_minors, &char_poly);
    let accepted = match strictness {
        Strictness::Strict => classification == Definiteness::PositiveDefinite,
        Strictness::AllowSemidefinite => matches!(
            classification,
            Definiteness::PositiveDefinite | Definiteness::PositiveSemidefiniteSingular
        ),
    };
    Ok(PdStatus { classification, strictness, accepted, leading_minors, char_poly })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn rm(dim: usize, upper: &[&str]) -> SymMatrix<Rational> {
        SymMatrix::from_upper(dim, upper.iter().map(|s| r(s)).collect()).unwrap()
    }

    #[test]
    fn identity_det_and_solve() {
        let i3 = SymMatrix::<Rational>::identity(3).unwrap();
        assert_eq!(det(&i3).unwrap(), Rational::one());
        let v = vec![r("1/2"), r("-3"), r("7")];
        assert_eq!(inverse_apply(&i3, &v).unwrap(), v);
        let s = classify_definiteness(&i3, Strictness::Strict).unwrap();
        assert_eq!(s.classification, Definiteness::PositiveDefinite);
    }

    #[test]
    fn singular_solve_fails() {
        let ones = rm(2, &["1", "1", "1"]);
        assert_eq!(inverse_apply(&ones, &[r("1"), r("2")]), Err(LinalgError::SingularMatrix));
    }

    #[test]
    fn pivoting_needed() {
        // zero leading entry forces a row swap
        let m = rm(2, &["0", "1", "0"]);
        assert_eq!(det(&m).unwrap(), r("-1"));
        assert_eq!(det_cofactor(&m).unwrap(), r("-1"));
        assert_eq!(inverse_apply(&m, &[r("2"), r("3")]).unwrap(), vec![r("3"), r("2")]);
        let s = classify_definiteness(&m, Strictness::AllowSemidefinite).unwrap();
        assert_eq!(s.classification, Definiteness::Indefinite);
    }

    #[test]
    fn classification_examples() {
        let c = |m: &SymMatrix<Rational>| classify_definiteness(m, Strictness::AllowSemidefinite).unwrap();
        assert_eq!(c(&rm(2, &["1", "0", "-1"])).classification, Definiteness::Indefinite);
        let d10 = c(&rm(2, &["1", "0", "0"]));
        assert_eq!(d10.classification, Definiteness::PositiveSemidefiniteSingular);
        assert!(d10.accepted);
        assert!(!classify_definiteness(&rm(2, &["1", "0", "0"]), Strictness::Strict).unwrap().accepted);
        assert_eq!(c(&rm(2, &["-2", "1", "-3"])).classification, Definiteness::NegativeDefinite);
        assert_eq!(c(&rm(2, &["-1", "0", "0"])).classification, Definiteness::NegativeSemidefinite);
        // leading minors nonnegative but not PSD
        assert_eq!(c(&rm(2, &["0", "0", "-1"])).classification, Definiteness::NegativeSemidefinite);
        assert_eq!(c(&rm(3, &["0", "0", "0", "1", "0", "-1"])).classification, Definiteness::Indefinite);
        // PSD with a zero leading minor: diag(0, 1)
        assert_eq!(c(&rm(2, &["0", "0", "1"])).classification, Definiteness::PositiveSemidefiniteSingular);
    }

    #[test]
    fn witness_rederives() {
        let m = rm(3, &["2", "1", "0", "2", "1", "2"]);
        let s = classify_definiteness(&m, Strictness::Strict).unwrap();
        assert_eq!(s.rederive(), s.classification);
        assert_eq!(s.det(), &r("4"));
    }

    #[test]
    fn char_poly_of_diagonal() {
        // (x−1)(x−2)(x−3) = x³ − 6x² + 11x − 6
        let m = SymMatrix::diagonal(&[r("1"), r("2"), r("3")]).unwrap();
        assert_eq!(char_poly(&m).unwrap(), vec![r("-6"), r("11"), r("-6"), r("1")]);
    }

    #[test]
    fn quad_entries_and_mixed_radicands() {
        let s2 = QuadExt::sqrt(&r("2")).unwrap();
        let s3 = QuadExt::sqrt(&r("3")).unwrap();
        let one = QuadExt::rational(r("1"));
        let m = SymMatrix::from_upper(2, vec![one.clone(), s2.clone(), one.clone()]).unwrap();
        // det = 1 − 2 = −1
        assert_eq!(det(&m).unwrap(), QuadExt::rational(r("-1")));
        let bad = SymMatrix::from_upper(2, vec![s2, s3, one]);
        assert_eq!(bad.unwrap_err(), LinalgError::MixedRadicands(2, 3));
    }

    #[test]
    fn json_shape() {
        let m = rm(2, &["1", "1/2", "3"]);
        let js = serde_json::to_string(&m).unwrap();
        assert_eq!(js, r#"{"dim":2,"upper":["1","1/2","3"]}"#);
        let back: SymMatrix<Rational> = serde_json::from_str(&js).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<SymMatrix<Rational>>(r#"{"dim":2,"upper":["1"]}"#).is_err());
    }

    #[test]
    fn dimension_cap() {
        assert_eq!(SymMatrix::<Rational>::identity(17).unwrap_err(), LinalgError::BadDimension(17));
        assert_eq!(SymMatrix::<Rational>::identity(0).unwrap_err(), LinalgError::BadDimension(0));
    }
}
