//! Exact scalars: rationals, quadratic-field elements, rational brackets of
//! real quantities, and decimal rendering. Nothing on a decision path here
//! touches floating point.

mod bracket;
mod quad;
mod rational;

pub use bracket::{exp_bracket, pi_bracket, Bracket};
pub use quad::{is_square_free, quad_sign, square_free_split, QuadExt};
pub use rational::{pow10, rat_arith, ArithOp, Rational};

use num_bigint::BigUint;
use num_traits::One;
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("input must be positive")]
    NonPositiveInput,
    #[error("radicands {0} and {1} do not share a field")]
    MixedRadicands(u64, u64),
    #[error("radicand does not fit in 64 bits")]
    RadicandTooLarge,
    #[error("cannot parse {0:?} as a rational")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// A decimal rendering with a flag telling whether it is the exact value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecimalRender {
    pub value: String,
    pub is_exact: bool,
}

impl Serialize for DecimalRender {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.value)
    }
}

impl std::fmt::Display for DecimalRender {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.value)
    }
}

/// Significant digits used in text reports.
pub const TEXT_DIGITS: usize = 12;
/// Significant digits used in JSON documents.
pub const JSON_DIGITS: usize = 30;

/// Round `x` to `sig` significant digits (half away from zero).
///
/// Positional notation is used for moderate exponents and `d.ddde±N`
/// otherwise; trailing fractional zeros are dropped.
pub fn render_decimal(x: &Rational, sig: usize) -> DecimalRender {
    let sig = sig.max(1);
    if x.is_zero() {
        return DecimalRender { value: "0".into(), is_exact: true };
    }
    let neg = x.is_negative();
    let ax = x.abs();
    let mut e = ax.floor_log10();
    let scaled = &ax * &pow10(sig as i64 - 1 - e);
    let half = Rational::frac(1, 2);
    let mut m = (&scaled + &half).floor();
    let exact_digits = scaled.is_integer();
    if m.to_string().len() > sig {
        m /= 10u32;
        e += 1;
    }
    let digits = m.to_string();
    let back = &Rational::integer(m.clone()) * &pow10(e - sig as i64 + 1);
    let is_exact = exact_digits && back == ax;

    let body = if (-7..21).contains(&e) {
        positional(&digits, e)
    } else {
        let (first, rest) = digits.split_at(1);
        let rest = rest.trim_end_matches('0');
        if rest.is_empty() {
            format!("{first}e{e}")
        } else {
            format!("{first}.{rest}e{e}")
        }
    };
    let value = if neg { format!("-{body}") } else { body };
    DecimalRender { value, is_exact }
}

fn positional(digits: &str, e: i64) -> String {
    let n = digits.len() as i64;
    let s = if e >= n - 1 {
        format!("{digits}{}", "0".repeat((e - n + 1) as usize))
    } else if e >= 0 {
        let (a, b) = digits.split_at((e + 1) as usize);
        format!("{a}.{b}")
    } else {
        format!("0.{}{digits}", "0".repeat((-e - 1) as usize))
    };
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Decimal rendering of a quadratic-field element, refined until the
/// rounded digits are certain.
pub fn render_quad(x: &QuadExt, sig: usize) -> DecimalRender {
    if let Some(r) = x.as_rational() {
        return render_decimal(r, sig);
    }
    let mut digits = sig as u32 + 8;
    loop {
        let (lo, hi) = x.bracket(digits);
        // A nonzero irrational value cannot sit on a rounding boundary, so
        // the two renderings eventually agree.
        let a = render_decimal(&lo, sig);
        let b = render_decimal(&hi, sig);
        if (a.value == b.value && lo.sign() == hi.sign()) || digits > 4000 {
            return DecimalRender { value: a.value, is_exact: false };
        }
        digits *= 2;
    }
}

/// Rational bracket of the real `k`-th root of `x > 0`:
/// `lo^k ≤ x ≤ hi^k` and `hi − lo < 10^-digits`.
///
/// With `S = 10^(digits+1)` the endpoints are `r/S` and `(r+1)/S` where `r`
/// is the integer `k`-th root of `⌊x·S^k⌋`, so refining the digits never
/// loosens either endpoint.
pub fn root_bracket(x: &Rational, k: u32, digits: u32) -> Result<(Rational, Rational), ExactError> {
    if !x.is_positive() || k == 0 {
        return Err(ExactError::NonPositiveInput);
    }
    let scale = pow10(digits as i64 + 1);
    let target = x * &scale.pow(k as i32);
    let n: BigUint = target.floor().to_biguint().expect("positive");
    let root = n.nth_root(k);
    let lo = &Rational::integer(num_bigint::BigInt::from(root.clone())) / &scale;
    let hi = &Rational::integer(num_bigint::BigInt::from(root + BigUint::one())) / &scale;
    debug_assert!(!lo.is_negative() && !hi.is_zero());
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn decimal_examples() {
        assert_eq!(render_decimal(&r("406/529"), 6).value, "0.767486");
        assert_eq!(render_decimal(&r("27/529"), 5).value, "0.05104");
        assert_eq!(render_decimal(&r("3"), 12).value, "3");
        assert!(render_decimal(&r("3"), 12).is_exact);
        assert_eq!(render_decimal(&r("-443/529"), 5).value, "-0.83743");
        assert_eq!(render_decimal(&r("1624/1095"), 5).value, "1.4831");
        assert_eq!(render_decimal(&r("9999/10000"), 3).value, "1");
        assert!(!render_decimal(&r("9999/10000"), 3).is_exact);
        assert_eq!(render_decimal(&r("1/8"), 12).value, "0.125");
        assert!(render_decimal(&r("1/8"), 12).is_exact);
        assert_eq!(render_decimal(&r("1/3"), 4).value, "0.3333");
        assert_eq!(render_decimal(&r("123456789"), 3).value, "123000000");
        assert_eq!(render_decimal(&r("1e30"), 3).value, "1e30");
        assert_eq!(render_decimal(&r("-12345e-12"), 2).value, "-1.2e-8");
    }

    #[test]
    fn quad_rendering() {
        let lam4 = QuadExt::new(r("11/92"), r("-3/46"), 3).unwrap();
        assert_eq!(render_quad(&lam4, 4).value, "0.006605");
        let root2 = QuadExt::sqrt(&r("2")).unwrap();
        assert_eq!(render_quad(&root2, 10).value, "1.414213562");
    }

    #[test]
    fn root_bracket_examples() {
        let (lo, hi) = root_bracket(&r("2"), 2, 3).unwrap();
        assert!(&hi - &lo < r("1e-3"));
        assert!(lo.square() <= r("2") && r("2") <= hi.square());
        assert!(lo <= r("1.41422") && r("1.41421") <= hi);

        let (lo, hi) = root_bracket(&r("9/4"), 2, 6).unwrap();
        assert!(lo <= r("3/2") && r("3/2") <= hi);
        assert!(&hi - &lo < r("1e-6"));

        let g4 = r("603/6496");
        let (lo, hi) = root_bracket(&g4, 2, 10).unwrap();
        assert!(lo.square() <= g4 && g4 <= hi.square());
        assert!(&hi - &lo < r("1e-10"));

        assert_eq!(root_bracket(&r("0"), 2, 3), Err(ExactError::NonPositiveInput));
        assert_eq!(root_bracket(&r("-1"), 3, 3), Err(ExactError::NonPositiveInput));
    }
}
