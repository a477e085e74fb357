use serde::{Deserialize, Serialize};

use super::{render_decimal, root_bracket, DecimalRender, ExactError, Rational};

/// Working precision (significant digits) for outward-rounded brackets.
const WORK_DIGITS: u32 = 48;

// π truncated to 60 decimals; the true value lies within one unit of the
// last place above it.
const PI_60: &str = "3.141592653589793238462643383279502884197169399375105820974944";

/// A closed rational interval `[lo, hi]` containing a positive real quantity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: Rational,
    pub hi: Rational,
}

impl Bracket {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "bracket endpoints out of order");
        Bracket { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Bracket { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::integer(2)
    }

    /// Product of two brackets of positive quantities.
    pub fn mul(&self, other: &Bracket) -> Bracket {
        debug_assert!(!self.lo.is_negative() && !other.lo.is_negative());
        Bracket { lo: &self.lo * &other.lo, hi: &self.hi * &other.hi }.outward()
    }

    /// Scale by a nonnegative exact factor.
    pub fn scale(&self, k: &Rational) -> Bracket {
        debug_assert!(!k.is_negative());
        Bracket { lo: &self.lo * k, hi: &self.hi * k }.outward()
    }

    /// `1/x` for a positive bracket.
    pub fn recip(&self) -> Result<Bracket, ExactError> {
        if !self.lo.is_positive() {
            return Err(ExactError::NonPositiveInput);
        }
        Ok(Bracket { lo: self.hi.recip()?, hi: self.lo.recip()? }.outward())
    }

    pub fn div(&self, other: &Bracket) -> Result<Bracket, ExactError> {
        if self.lo == self.hi && other.lo == other.hi {
            return Ok(Bracket::point(self.lo.checked_div(&other.lo)?));
        }
        Ok(self.mul(&other.recip()?))
    }

    /// `√x` for a positive bracket.
    pub fn sqrt(&self) -> Result<Bracket, ExactError> {
        if self.lo == self.hi {
            if let Some(r) = super::QuadExt::sqrt(&self.lo).ok().and_then(|q| q.as_rational().cloned()) {
                return Ok(Bracket::point(r));
            }
        }
        let digits = self.digits_for_roots();
        let (lo, _) = root_bracket(&self.lo, 2, digits)?;
        let (_, hi) = root_bracket(&self.hi, 2, digits)?;
        Ok(Bracket { lo, hi }.outward())
    }

    /// `x^e` for a real exponent `e = p/2` (half-integer powers), positive `x`.
    pub fn pow_half(&self, twice_exp: i32) -> Result<Bracket, ExactError> {
        let whole = twice_exp.div_euclid(2);
        let odd = twice_exp.rem_euclid(2) == 1;
        let mut out = if whole >= 0 {
            Bracket { lo: self.lo.pow(whole), hi: self.hi.pow(whole) }
        } else {
            Bracket { lo: self.hi.pow(whole), hi: self.lo.pow(whole) }
        };
        if odd {
            out = out.mul(&self.sqrt()?);
        }
        Ok(out.outward())
    }

    fn digits_for_roots(&self) -> u32 {
        let mag = if self.lo.is_zero() { 0 } else { self.lo.floor_log10() };
        (WORK_DIGITS as i64 - mag.min(0)).max(WORK_DIGITS as i64) as u32
    }

    /// Loosen both endpoints onto a grid of `WORK_DIGITS` significant digits
    /// so repeated products keep bounded size.
    fn outward(self) -> Bracket {
        Bracket { lo: self.lo.floor_to_sig(WORK_DIGITS), hi: self.hi.ceil_to_sig(WORK_DIGITS) }
    }

    /// Render the midpoint. The bracket is far narrower than the requested
    /// digits for every quantity this crate produces.
    pub fn render(&self, sig: usize) -> DecimalRender {
        let mut d = render_decimal(&self.midpoint(), sig);
        d.is_exact = d.is_exact && self.lo == self.hi;
        d
    }
}

/// Rational bracket of π of width `10^-60`.
pub fn pi_bracket() -> Bracket {
    let lo: Rational = PI_60.parse().expect("valid literal");
    let hi = &lo + &super::pow10(-60);
    Bracket { lo, hi }
}

/// Bracket of `e^x` for `x ≥ 0` given as a bracket.
///
/// `e^t` for `t ≤ 1/2` is bounded by the Taylor partial sum below and the
/// partial sum plus twice the next term above; the result is raised back by
/// repeated squaring.
pub fn exp_bracket(x: &Bracket) -> Bracket {
    assert!(!x.lo.is_negative(), "exp_bracket expects a nonnegative argument");
    let lo = exp_side(&x.lo, false);
    let hi = exp_side(&x.hi, true);
    Bracket { lo, hi }
}

fn exp_side(x: &Rational, upper: bool) -> Rational {
    let half = Rational::frac(1, 2);
    let mut squarings = 0u32;
    let mut t = x.clone();
    while t > half {
        t = &t / &Rational::integer(2);
        squarings += 1;
    }
    let mut term = Rational::one();
    let mut sum = Rational::one();
    for i in 1..=60 {
        term = &(&term * &t) / &Rational::integer(i);
        sum = &sum + &term;
    }
    let mut val = if upper {
        let next = &(&term * &t) / &Rational::integer(61);
        (&sum + &(&next * &Rational::integer(2))).ceil_to_sig(WORK_DIGITS + 8)
    } else {
        sum.floor_to_sig(WORK_DIGITS + 8)
    };
    for _ in 0..squarings {
        val = val.square();
        val = if upper {
            val.ceil_to_sig(WORK_DIGITS + 8)
        } else {
            val.floor_to_sig(WORK_DIGITS + 8)
        };
    }
    val
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn pi_contains_known_digits() {
        let p = pi_bracket();
        assert!(p.contains(&r("3.14159265358979323846264338327950288419716939937510582097494459")));
        assert!(p.width() <= r("1e-60"));
    }

    #[test]
    fn exp_one_and_zero() {
        let e1 = exp_bracket(&Bracket::point(Rational::one()));
        assert!(e1.contains(&r("2.718281828459045235360287471352662497757247093699959574966967627724")));
        assert!(e1.width() < r("1e-40"));
        let e0 = exp_bracket(&Bracket::point(Rational::zero()));
        assert!(e0.contains(&Rational::one()));
    }

    #[test]
    fn exp_forty_pi_is_tight() {
        let arg = pi_bracket().scale(&Rational::integer(40));
        let e = exp_bracket(&arg);
        // e^{40π} ≈ 3.75884e54
        let rel = &e.width() / &e.lo;
        assert!(rel < r("1e-40"));
        assert_eq!(e.render(5).value, "3.7588e54");
    }

    #[test]
    fn half_powers() {
        let g = Bracket::point(r("1/4"));
        let b = g.pow_half(-3).unwrap(); // (1/4)^{-3/2} = 8
        assert!(b.contains(&r("8")));
        assert!(b.width() < r("1e-30"));
        let b = g.pow_half(-4).unwrap();
        assert_eq!(b, Bracket::point(r("16")));
    }
}
