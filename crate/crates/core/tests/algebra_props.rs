use proptest::prelude::*;
use weylres_core::{AlgebraParams, Function, ModelSemantics, WeylElement, C64};

const LAMBDAS: [(f64, f64); 4] = [(1.0, 0.0), (0.5, 0.0), (2.0, 0.0), (0.3, 0.1)];

fn lambda_strategy() -> impl Strategy<Value = AlgebraParams> {
    (0..LAMBDAS.len()).prop_map(|i| AlgebraParams::new(C64::new(LAMBDAS[i].0, LAMBDAS[i].1)).unwrap())
}

fn element_in(min_x: i64, max_deg: i64) -> impl Strategy<Value = WeylElement> {
    prop::collection::vec((min_x..=max_deg, 0..=max_deg as u32, -2.0..2.0f64, -2.0..2.0f64), 1..4)
        .prop_map(|ts| WeylElement::from_terms(ts.into_iter().map(|(m, n, re, im)| ((m, n), C64::new(re, im)))))
}

/// Polynomial elements of degree at most `max_deg` in each generator.
fn element(max_deg: i64) -> impl Strategy<Value = WeylElement> {
    element_in(0, max_deg)
}

/// Elements with negative powers of X as well.
fn laurent_element(max_deg: i64) -> impl Strategy<Value = WeylElement> {
    element_in(-max_deg / 2, max_deg)
}

fn close(a: &WeylElement, b: &WeylElement, tol: f64) -> bool {
    a.max_abs_diff(b) <= tol * a.max_abs_coeff().max(b.max_abs_coeff()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn associative(p in lambda_strategy(), a in element(4), b in element(4), c in element(4)) {
        let left = p.multiply(&p.multiply(&a, &b), &c);
        let right = p.multiply(&a, &p.multiply(&b, &c));
        prop_assert!(close(&left, &right, 1e-12), "diff {}", left.max_abs_diff(&right));
    }

    #[test]
    fn associative_with_inverse_powers(p in lambda_strategy(), a in laurent_element(4), b in laurent_element(4), c in laurent_element(4)) {
        let ab = p.multiply(&a, &b);
        let bc = p.multiply(&b, &c);
        let left = p.multiply(&ab, &c);
        let right = p.multiply(&a, &bc);
        // Negative powers of a small lambda make partial sums much larger
        // than any coefficient of the result.
        let scale = [&ab, &bc, &left, &right].iter().map(|w| w.max_abs_coeff()).fold(1.0, f64::max);
        prop_assert!(left.max_abs_diff(&right) <= 1e-10 * scale);
    }

    #[test]
    fn distributive(p in lambda_strategy(), a in element(4), b in element(4), c in element(4)) {
        let left = p.multiply(&a, &(&b + &c));
        let right = p.multiply(&a, &b) + p.multiply(&a, &c);
        prop_assert!(close(&left, &right, 1e-12));
        let left = p.multiply(&(&a + &b), &c);
        let right = p.multiply(&a, &c) + p.multiply(&b, &c);
        prop_assert!(close(&left, &right, 1e-12));
    }

    #[test]
    fn one_is_identity(p in lambda_strategy(), a in element(4)) {
        prop_assert_eq!(p.multiply(&WeylElement::one(), &a), a.clone());
        prop_assert_eq!(p.multiply(&a, &WeylElement::one()), a);
    }

    #[test]
    fn x_inverse_cancels(p in lambda_strategy(), m in -6i64..6) {
        let prod = p.multiply(&WeylElement::x_pow(m), &WeylElement::x_pow(-m));
        prop_assert_eq!(prod, WeylElement::one());
    }

    #[test]
    fn reduction_commutes_with_d(p in lambda_strategy(), a in element(4)) {
        // ∂·a mod A∂ only depends on a mod A∂.
        let lhs = p.multiply(&WeylElement::d(), &a).reduce_mod_ideal();
        let rhs = p.reduced_d_action(&a.reduce_mod_ideal());
        let diff = (&lhs.to_element() - &rhs.to_element()).max_abs_coeff();
        prop_assert!(diff <= 1e-12 * lhs.to_element().max_abs_coeff().max(1.0));
    }
}

#[test]
fn defining_relation_is_exact() {
    for (re, im) in LAMBDAS {
        let l = C64::new(re, im);
        let p = AlgebraParams::new(l).unwrap();
        let dx = p.multiply(&WeylElement::d(), &WeylElement::x());
        let xd = p.multiply(&WeylElement::x(), &WeylElement::d()).scale(l);
        assert_eq!(&dx - &xd, WeylElement::one());
    }
}

#[test]
fn d_x_power_modulo_ideal() {
    for (re, im) in LAMBDAS {
        let l = C64::new(re, im);
        let p = AlgebraParams::new(l).unwrap();
        for m in -5i64..=5 {
            let red = p.multiply(&WeylElement::d(), &WeylElement::x_pow(m)).reduce_mod_ideal();
            let want = if l == C64::new(1.0, 0.0) {
                C64::new(m as f64, 0.0)
            } else {
                (l.powi(m as i32) - 1.0) / (l - 1.0)
            };
            let got = red.coeff(m - 1);
            assert!((got - want).norm() <= 1e-12 * want.norm().max(1.0), "lambda={l} m={m}: {got} vs {want}");
            assert_eq!(red.terms().count(), usize::from(want != C64::new(0.0, 0.0)));
        }
    }
}

fn semantics_all() -> Vec<ModelSemantics> {
    vec![
        ModelSemantics::classical(),
        ModelSemantics::forward_difference(),
        ModelSemantics::jackson_a(C64::new(0.5, 0.0)).unwrap(),
        ModelSemantics::jackson_b(C64::new(0.5, 0.0)).unwrap(),
    ]
}

fn test_function() -> Function {
    weylres_core::parse_function("exp(t/3) + t^2 - (0.5+1i)").unwrap().into()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn action_is_a_homomorphism(a in element(2), b in element(2), re in 0.5..2.0f64, im in 0.3..1.0f64) {
        let f = test_function();
        let t = C64::new(re, im);
        for s in semantics_all() {
            let alg = s.algebra();
            let whole = s.interpret(&alg.multiply(&a, &b), &f).unwrap().eval(t).unwrap();
            let inner = s.interpret(&b, &f).unwrap();
            let nested = s.interpret(&a, &inner).unwrap().eval(t).unwrap();
            let scale = whole.norm().max(nested.norm()).max(1e-6);
            prop_assert!((whole - nested).norm() <= 1e-9 * scale, "{:?}: {} vs {}", s.kind(), whole, nested);
        }
    }
}
