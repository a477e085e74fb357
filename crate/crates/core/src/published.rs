//! Printed reference values for the two worked parameter sets, and the rule
//! for deciding whether an exact value agrees with a printed decimal.

use serde::{Deserialize, Serialize};

use crate::exact::{pow10, QuadExt, Rational, Sign};

/// The printed decimals and parameters for one dimension.
#[derive(Clone, Debug)]
pub struct PublishedSet {
    pub n: u32,
    pub eps: &'static str,
    pub a: &'static str,
    pub alpha: &'static str,
    pub beta: &'static str,
    pub lambda: &'static str,
    pub b: &'static str,
    pub tau: &'static str,
    pub eta: &'static str,
    pub coeff: &'static str,
    pub theta: &'static str,
    pub vol_target_pi2: &'static str,
    pub growth_folded_coeff: &'static str,
}

const N4: PublishedSet = PublishedSet {
    n: 4,
    eps: "3/20",
    a: "1",
    alpha: "1",
    beta: "1/2",
    lambda: "0.0335",
    b: "3",
    tau: "0.285",
    eta: "0.7675",
    coeff: "-0.8374",
    theta: "1.4921",
    vol_target_pi2: "72",
    growth_folded_coeff: "18",
};

const N5: PublishedSet = PublishedSet {
    n: 5,
    eps: "1/1000",
    a: "28/25",
    alpha: "3/4",
    beta: "1/11",
    lambda: "0.1998",
    b: "4.3307",
    tau: "0.71657",
    eta: "0.8911",
    coeff: "-0.0297",
    theta: "1.3627",
    vol_target_pi2: "84",
    growth_folded_coeff: "84/5",
};

pub fn published_set(n: u32) -> Option<&'static PublishedSet> {
    match n {
        4 => Some(&N4),
        5 => Some(&N5),
        _ => None,
    }
}

impl PublishedSet {
    pub fn eps(&self) -> Rational {
        self.eps.parse().expect("literal")
    }
    pub fn a(&self) -> Rational {
        self.a.parse().expect("literal")
    }
    pub fn alpha(&self) -> Rational {
        self.alpha.parse().expect("literal")
    }
    pub fn beta(&self) -> Rational {
        self.beta.parse().expect("literal")
    }
}

/// A printed value next to the exact one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublishedClaim {
    pub printed: String,
    pub matches: bool,
    /// Half a unit in the last printed place.
    pub tolerance: Rational,
}

/// Half a unit in the last place of a printed decimal (`½` for integers).
pub fn half_ulp(printed: &str) -> Rational {
    let decimals = printed.split_once('.').map_or(0, |(_, f)| f.len() as i64);
    &pow10(-decimals) / &Rational::integer(2)
}

/// A printed decimal matches when it is a correct rounding of the exact
/// value: `|x − printed| ≤ ½·10^(−decimals)`, decided exactly.
pub fn claim_for(exact: &QuadExt, printed: &str) -> PublishedClaim {
    let p: Rational = printed.parse().expect("printed literal");
    let tol = half_ulp(printed);
    let diff = exact.try_sub(&QuadExt::rational(p)).expect("rational operand");
    let upper = QuadExt::rational(tol.clone()).try_sub(&diff).expect("rational operand");
    let lower = diff.try_add(&QuadExt::rational(tol.clone())).expect("rational operand");
    let matches = upper.sign() != Sign::Negative && lower.sign() != Sign::Negative;
    PublishedClaim { printed: printed.to_string(), matches, tolerance: tol }
}

pub fn claim_for_rational(exact: &Rational, printed: &str) -> PublishedClaim {
    claim_for(&QuadExt::rational(exact.clone()), printed)
}
