use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::{root_bracket, ExactError, Rational, Sign};

/// An element `rat + coef·√radicand` of a real quadratic field.
///
/// The radicand is square-free. A value whose irrational part vanishes is
/// stored with `coef = 0` and `radicand = 1`; such values combine with any
/// field. Two values with nonzero irrational parts must share a radicand.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "QuadRepr", into = "QuadRepr")]
pub struct QuadExt {
    rat: Rational,
    coef: Rational,
    radicand: u64,
}

#[derive(Serialize, Deserialize)]
struct QuadRepr {
    rat: Rational,
    coef: Rational,
    radicand: u64,
}

impl TryFrom<QuadRepr> for QuadExt {
    type Error = ExactError;
    fn try_from(r: QuadRepr) -> Result<Self, Self::Error> {
        QuadExt::new(r.rat, r.coef, r.radicand)
    }
}

impl From<QuadExt> for QuadRepr {
    fn from(q: QuadExt) -> Self {
        QuadRepr { rat: q.rat, coef: q.coef, radicand: q.radicand }
    }
}

/// Split `n = s²·d` with `d` square-free. Trial division; radicands here are tiny.
pub fn square_free_split(n: u64) -> (u64, u64) {
    let mut outside = 1u64;
    let mut inside = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        outside *= p.pow(e / 2);
        if e % 2 == 1 {
            inside *= p;
        }
        p += 1;
    }
    (outside, inside * rest)
}

impl QuadExt {
    /// Builds `rat + coef·√radicand`, pulling square factors out of the radicand.
    pub fn new(rat: Rational, coef: Rational, radicand: u64) -> Result<Self, ExactError> {
        if radicand == 0 {
            return Ok(QuadExt::rational(rat));
        }
        let (outside, inside) = square_free_split(radicand);
        let coef = &coef * &Rational::integer(outside);
        if inside == 1 || coef.is_zero() {
            return Ok(QuadExt::rational(rat + coef));
        }
        Ok(QuadExt { rat, coef, radicand: inside })
    }

    pub fn rational(r: Rational) -> Self {
        QuadExt { rat: r, coef: Rational::zero(), radicand: 1 }
    }

    /// Exact `√x` for a nonnegative rational, normalized as `c·√d`.
    pub fn sqrt(x: &Rational) -> Result<Self, ExactError> {
        if x.is_negative() {
            return Err(ExactError::NonPositiveInput);
        }
        // √(p/q) = √(p·q)/q
        let pq = x.numer() * x.denom();
        let pq = pq.to_u64().ok_or(ExactError::RadicandTooLarge)?;
        let inv_q = Rational::new(BigInt::one(), x.denom().clone())?;
        QuadExt::new(Rational::zero(), inv_q, pq)
    }

    pub fn rat(&self) -> &Rational {
        &self.rat
    }

    pub fn coef(&self) -> &Rational {
        &self.coef
    }

    /// Square-free radicand; 1 when the value is rational.
    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.coef.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.rat)
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.coef.is_zero()
    }

    /// Radicand compatibility: `Ok(d)` is the radicand of the combined field.
    pub fn common_radicand(&self, other: &QuadExt) -> Result<u64, ExactError> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Ok(1),
            (true, false) => Ok(other.radicand),
            (false, true) => Ok(self.radicand),
            (false, false) if self.radicand == other.radicand => Ok(self.radicand),
            _ => Err(ExactError::MixedRadicands(self.radicand, other.radicand)),
        }
    }

    pub fn try_add(&self, o: &QuadExt) -> Result<QuadExt, ExactError> {
        let d = self.common_radicand(o)?;
        Ok(QuadExt::raw(&self.rat + &o.rat, &self.coef + &o.coef, d))
    }

    pub fn try_sub(&self, o: &QuadExt) -> Result<QuadExt, ExactError> {
        let d = self.common_radicand(o)?;
        Ok(QuadExt::raw(&self.rat - &o.rat, &self.coef - &o.coef, d))
    }

    pub fn try_mul(&self, o: &QuadExt) -> Result<QuadExt, ExactError> {
        let d = self.common_radicand(o)?;
        let dr = Rational::integer(d);
        let rat = &self.rat * &o.rat + &(&self.coef * &o.coef) * &dr;
        let coef = &self.rat * &o.coef + &o.rat * &self.coef;
        Ok(QuadExt::raw(rat, coef, d))
    }

    /// Multiplicative inverse `(p − q√d)/(p² − q²d)`; the denominator is
    /// nonzero because `d` is not a perfect square.
    pub fn try_recip(&self) -> Result<QuadExt, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let d = Rational::integer(self.radicand);
        let norm = self.rat.square() - &self.coef.square() * &d;
        let rat = self.rat.checked_div(&norm)?;
        let coef = (-&self.coef).checked_div(&norm)?;
        Ok(QuadExt::raw(rat, coef, self.radicand))
    }

    pub fn try_div(&self, o: &QuadExt) -> Result<QuadExt, ExactError> {
        self.common_radicand(o)?;
        self.try_mul(&o.try_recip()?)
    }

    fn raw(rat: Rational, coef: Rational, radicand: u64) -> QuadExt {
        if coef.is_zero() || radicand == 1 {
            QuadExt::rational(rat)
        } else {
            QuadExt { rat, coef, radicand }
        }
    }

    /// Exact sign; see [`quad_sign`].
    pub fn sign(&self) -> Sign {
        quad_sign(self)
    }

    /// Rational bracket `[lo, hi]` of the real value with width below `10^-digits`.
    pub fn bracket(&self, digits: u32) -> (Rational, Rational) {
        if self.is_rational() {
            return (self.rat.clone(), self.rat.clone());
        }
        // Scale the root precision so |coef|·(root width) stays below the target.
        let extra = if self.coef.abs() > Rational::one() {
            (self.coef.abs().floor_log10() + 1) as u32
        } else {
            0
        };
        let (rlo, rhi) = root_bracket(&Rational::integer(self.radicand), 2, digits + extra + 1)
            .expect("radicand is positive");
        let a = &self.rat + &(&self.coef * &rlo);
        let b = &self.rat + &(&self.coef * &rhi);
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_rational() {
            return self.rat.to_f64();
        }
        let (lo, hi) = self.bracket(20);
        ((&lo + &hi) / Rational::integer(2)).to_f64()
    }
}

/// Exact sign of `p + q√d` by case analysis on `sign(p)`, `sign(q)` and the
/// comparison of `p²` against `q²·d`.
pub fn quad_sign(x: &QuadExt) -> Sign {
    let sp = x.rat.sign();
    let sq = x.coef.sign();
    match (sp, sq) {
        (s, Sign::Zero) => s,
        (Sign::Zero, s) => s,
        (a, b) if a == b => a,
        _ => {
            // Opposite signs: the term with the larger square wins.
            let p2 = x.rat.square();
            let q2d = &x.coef.square() * &Rational::integer(x.radicand);
            match p2.cmp(&q2d) {
                std::cmp::Ordering::Greater => sp,
                std::cmp::Ordering::Less => sq,
                std::cmp::Ordering::Equal => Sign::Zero,
            }
        }
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.rat);
        }
        let (sign, mag) = if self.coef.is_negative() {
            ("-", -&self.coef)
        } else {
            ("+", self.coef.clone())
        };
        let coef_txt = if mag == 1 { String::new() } else { format!("({mag})") };
        if self.rat.is_zero() {
            let lead = if sign == "-" { "-" } else { "" };
            write!(f, "{lead}{coef_txt}√{}", self.radicand)
        } else {
            write!(f, "{} {sign} {coef_txt}√{}", self.rat, self.radicand)
        }
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Rational> for QuadExt {
    fn from(r: Rational) -> Self {
        QuadExt::rational(r)
    }
}

// Operator forms panic on mixed radicands, which is a contract violation.
impl Add for &QuadExt {
    type Output = QuadExt;
    fn add(self, o: &QuadExt) -> QuadExt {
        self.try_add(o).expect("mixed radicands")
    }
}

impl Sub for &QuadExt {
    type Output = QuadExt;
    fn sub(self, o: &QuadExt) -> QuadExt {
        self.try_sub(o).expect("mixed radicands")
    }
}

impl Mul for &QuadExt {
    type Output = QuadExt;
    fn mul(self, o: &QuadExt) -> QuadExt {
        self.try_mul(o).expect("mixed radicands")
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt::raw(-&self.rat, -&self.coef, self.radicand)
    }
}

/// True when `n` has no repeated prime factor (and `n ≥ 2`).
pub fn is_square_free(n: u64) -> bool {
    n >= 2 && square_free_split(n).0 == 1
}
