use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::constants::{pinch_x, PinchInput};
use crate::exact::Rational;
use crate::linalg::{Strictness, MAX_DIM};
use crate::published::published_set;

pub const MIN_N: u32 = 4;
pub const MAX_N: u32 = MAX_DIM as u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// The weight exponent of the bubble functional.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum KChoice {
    /// `k = a/X`, i.e. `k = 1/η`.
    #[default]
    Auto,
    Fixed(Rational),
}

impl fmt::Display for KChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KChoice::Auto => f.write_str("auto"),
            KChoice::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for KChoice {
    type Err = crate::exact::ExactError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("auto") {
            Ok(KChoice::Auto)
        } else {
            s.parse().map(KChoice::Fixed)
        }
    }
}

impl Serialize for KChoice {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for KChoice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Whether the θ range condition takes part in the verdict.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaRule {
    /// θ from the displayed Jacobi coefficient `4η/((4η−1)α)`.
    #[default]
    Displayed,
    /// θ is reported but excluded from the verdict.
    Skip,
}

impl FromStr for ThetaRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "displayed" => Ok(ThetaRule::Displayed),
            "skip" => Ok(ThetaRule::Skip),
            other => Err(format!("unknown theta rule {other:?} (expected displayed or skip)")),
        }
    }
}

impl fmt::Display for ThetaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThetaRule::Displayed => "displayed",
            ThetaRule::Skip => "skip",
        })
    }
}

/// Input of a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSet {
    pub n: u32,
    pub eps: Rational,
    pub a: Rational,
    pub alpha: Rational,
    #[serde(default)]
    pub k: KChoice,
    pub beta: Rational,
    #[serde(default)]
    pub strictness: Strictness,
    #[serde(default)]
    pub theta_rule: ThetaRule,
}

impl ParamSet {
    /// The printed parameter set for `n ∈ {4, 5}` with default policies.
    pub fn published(n: u32) -> Result<Self, CertifyError> {
        let s = published_set(n)
            .ok_or_else(|| CertifyError::InvalidParams(format!("no printed parameter set for n = {n}")))?;
        Ok(ParamSet {
            n,
            eps: s.eps(),
            a: s.a(),
            alpha: s.alpha(),
            k: KChoice::Auto,
            beta: s.beta(),
            strictness: Strictness::AllowSemidefinite,
            theta_rule: ThetaRule::Displayed,
        })
    }

    /// Structural validity. Admissibility ranges (`0 < ε < 1`, `α ≤ 1`,
    /// `0 < k < 4`, …) are conditions of the certificate, not errors.
    pub fn validate(&self) -> Result<(), CertifyError> {
        let bad = |m: String| Err(CertifyError::InvalidParams(m));
        if !(MIN_N..=MAX_N).contains(&self.n) {
            return bad(format!("n = {} outside [{MIN_N}, {MAX_N}]", self.n));
        }
        if self.eps <= Rational::integer(-1) {
            return bad(format!("ε = {} ≤ −1", self.eps));
        }
        if !self.a.is_positive() {
            return bad(format!("a = {} must be positive", self.a));
        }
        if !self.alpha.is_positive() {
            return bad(format!("α = {} must be positive", self.alpha));
        }
        if let KChoice::Fixed(k) = &self.k {
            if !k.is_positive() {
                return bad(format!("k = {k} must be positive"));
            }
        }
        if !self.beta.is_positive() {
            return bad(format!("β = {} must be positive", self.beta));
        }
        Ok(())
    }

    /// The k actually used; `None` when `k = a/X` with `X = 0`.
    pub fn effective_k(&self) -> Option<Rational> {
        match &self.k {
            KChoice::Fixed(k) => Some(k.clone()),
            KChoice::Auto => {
                let pin = PinchInput::new(self.n, self.eps.clone()).ok()?;
                let x = pinch_x(&pin);
                (!x.is_zero()).then(|| &self.a / &x)
            }
        }
    }
}
