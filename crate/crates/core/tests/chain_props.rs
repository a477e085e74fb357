use proptest::prelude::*;

use pinchcert::certifier::build_s_matrix;
use pinchcert::constants::{b_const, build_b_matrix, delta_sq, gamma, lambda_n, pinch_x, tau_eta, tau_eta_from, PinchInput};
use pinchcert::exact::Rational;
use pinchcert::linalg::{det, dot, inverse_apply, leading_minors, SymMatrix};
use pinchcert::Sign;

fn unit_frac() -> impl Strategy<Value = Rational> {
    (1i64..1000).prop_map(|p| Rational::frac(p, 1000))
}

fn pin(n: u32, eps: &Rational) -> PinchInput {
    PinchInput::new(n, eps.clone()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pinch_x_at_most_one(n in 4u32..=12, eps in (0i64..5000, 1i64..100)) {
        let eps = Rational::frac(eps.0, eps.1);
        let x = pinch_x(&pin(n, &eps));
        prop_assert!(x <= Rational::one());
        prop_assert_eq!(x == Rational::one(), eps.is_zero());
    }

    #[test]
    fn delta_sq_increasing(n in 4u32..=12, e1 in unit_frac(), e2 in unit_frac()) {
        prop_assume!(e1 < e2);
        prop_assert!(delta_sq(&pin(n, &e1)) < delta_sq(&pin(n, &e2)));
    }

    #[test]
    fn lambda_five_is_rational(eps in unit_frac()) {
        prop_assert!(lambda_n(&pin(5, &eps)).is_rational());
    }

    #[test]
    fn round_trip_identities(
        n in 4u32..=8,
        eps in unit_frac(),
        a in (1i64..=40, 1i64..=10),
        alpha in (1i64..=10, 1i64..=10),
    ) {
        let (a, alpha) = (Rational::frac(a.0, a.1), Rational::frac(alpha.0, alpha.1));
        prop_assume!(a >= Rational::frac(1, 2) && &a * &Rational::integer(2) >= alpha && alpha <= Rational::one());
        let p = pin(n, &eps);
        let te = tau_eta(&p, &a, &alpha);
        prop_assume!(te.is_ok());
        let te = te.unwrap();
        prop_assert_eq!(&te.eta * &a, pinch_x(&p));
        let want_tau = if te.coeff.is_negative() { &te.base + &te.coeff } else { te.base.clone() };
        prop_assert_eq!(&te.tau, &want_tau);
        let b = b_const(n, &a, &alpha).unwrap();
        prop_assert_eq!(tau_eta_from(n, &pinch_x(&p), &b, &a, &alpha), te.clone());
        if te.tau.is_positive() {
            let g = gamma(n, &te.tau, &alpha, &te.eta).unwrap();
            let back = &(&(&(&g * &Rational::integer(2 * (n - 2))) * &alpha) * &te.eta);
            prop_assert_eq!(back, &te.tau);
        }
    }

    #[test]
    fn b_invariant_under_trailing_permutations(
        n in 4u32..=7,
        a in (1i64..=20, 1i64..=5),
        alpha in (1i64..=10, 1i64..=10),
        perm in Just(()).prop_perturb(|_, mut rng| rng.next_u64()),
    ) {
        let (a, alpha) = (Rational::frac(a.0, a.1), Rational::frac(alpha.0, alpha.1));
        prop_assume!(a >= Rational::frac(1, 2) && &a * &Rational::integer(2) >= alpha);
        let b = b_const(n, &a, &alpha);
        prop_assume!(b.is_ok());
        let (bm, cbar) = build_b_matrix(n, &a, &alpha).unwrap();
        let d = n as usize;
        // Fisher–Yates on the trailing indices, driven by one random word.
        let mut sigma: Vec<usize> = (0..d).collect();
        let mut w = perm;
        for i in (3..d).rev() {
            let j = 2 + (w % (i as u64 - 1)) as usize;
            w /= i as u64;
            sigma.swap(i, j);
        }
        let pb = SymMatrix::from_fn(d, |i, j| bm.get(sigma[i], sigma[j]).clone()).unwrap();
        let pc: Vec<Rational> = sigma.iter().map(|&i| cbar[i].clone()).collect();
        let b_perm = &dot(&pc, &inverse_apply(&pb, &pc).unwrap()) / &Rational::integer(4);
        prop_assert_eq!(b_perm, b.unwrap());
    }

    #[test]
    fn det_s_decreases_in_beta(
        n in 4u32..=8,
        alpha in 0i64..=10,
        k in 1i64..=15,
        b1 in (0i64..100, 1i64..=100),
        step in (1i64..100, 1i64..=100),
    ) {
        let (alpha, k) = (Rational::frac(alpha, 10), Rational::frac(k, 10));
        let b1 = Rational::frac(b1.0, b1.1);
        let b2 = &b1 + &Rational::frac(step.0, step.1);
        let s1 = build_s_matrix(n, &alpha, &k, &b1);
        let minor2 = leading_minors(&s1).unwrap()[1].clone();
        prop_assume!(minor2.sign() == Sign::Positive);
        let d1 = det(&s1).unwrap();
        let d2 = det(&build_s_matrix(n, &alpha, &k, &b2)).unwrap();
        prop_assert_eq!(d1.try_sub(&d2).unwrap().sign(), Sign::Positive);
    }
}

#[test]
fn worked_cases_reproduce() {
    let q = |s: &str| s.parse::<Rational>().unwrap();
    // n = 4: base = 7X − 17/4 and coeff = 3 − 5X with X = pinch_x(3/20).
    let p4 = pin(4, &q("3/20"));
    let x = pinch_x(&p4);
    let te = tau_eta(&p4, &q("1"), &q("1")).unwrap();
    assert_eq!(te.base, &(&q("7") * &x) - &q("17/4"));
    assert_eq!(te.coeff, &q("3") - &(&q("5") * &x));
    // n = 5: τ = (375/112)·Y − 21/8 with Y = pinch_x(1/1000).
    let p5 = pin(5, &q("1/1000"));
    let y = pinch_x(&p5);
    let te = tau_eta(&p5, &q("28/25"), &q("3/4")).unwrap();
    assert_eq!(te.tau, &(&q("375/112") * &y) - &q("21/8"));
    assert!((te.coeff.to_f64() + 0.0297).abs() < 1e-3);
}
