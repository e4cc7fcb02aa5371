use proptest::prelude::*;
use weylres_core::charlier::{
    charlier_operator_power, charlier_rodrigues_oracle, charlier_sum, charlier_symbolic, falling_to_monomial,
};
use weylres_core::coefficients::synthesize;
use weylres_core::{AnalyticFunction, Function, ModelSemantics, WeylElement, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

#[test]
fn four_routes_agree() {
    let s = ModelSemantics::forward_difference();
    for n in 0..=8 {
        for a in [0.5, 1.0, 2.0] {
            let sym = charlier_symbolic(n, c(a)).unwrap();
            assert_eq!(sym.falling.len(), n as usize + 1);
            let lead = (-c(a)).powi(-(n as i32));
            assert!(rel(sym.falling[n as usize], lead) < 1e-15);
            let syn = synthesize(&s, &sym.falling);
            for x in 0..=10u64 {
                let xc = c(x as f64);
                let v1 = syn.eval(xc).unwrap();
                let v2 = charlier_sum(n, c(a), xc).unwrap();
                let v3 = charlier_rodrigues_oracle(n, c(a), x).unwrap();
                let v4 = charlier_operator_power(n, c(a), xc).unwrap();
                let v5 = sym.eval_monomial(xc);
                for v in [v2, v3, v4, v5] {
                    if v1.norm() < 1e-12 {
                        assert!(v.norm() < 1e-9, "n={n} a={a} x={x}");
                    } else {
                        assert!(rel(v1, v) <= 1e-9, "n={n} a={a} x={x}: {v1} vs {v}");
                    }
                }
            }
        }
    }
}

#[test]
fn operator_identity_on_sample_grid() {
    let s = ModelSemantics::forward_difference();
    let a = c(1.5);
    let op = WeylElement::one() - WeylElement::x().scale(a.inv());
    let f: Function = weylres_core::parse_function("exp(t/4) + t^3").unwrap().into();
    let lhs = s.interpret(&op, &f).unwrap();
    for i in 0..10 {
        for j in 0..3 {
            let x = C64::new(-2.0 + 0.7 * i as f64, -1.0 + j as f64);
            let want = f.eval(x).unwrap() - x / a * f.eval(x - 1.0).unwrap();
            assert!((lhs.eval(x).unwrap() - want).norm() <= 1e-12 * want.norm().max(1.0));
        }
    }
}

#[test]
fn image_of_the_power_on_one() {
    // (1 - X/a)^n applied to 1 under the difference action.
    let s = ModelSemantics::forward_difference();
    let a = c(2.0);
    let base = WeylElement::one() - WeylElement::x().scale(a.inv());
    let w = s.algebra().power(&base, 4);
    let g = s.interpret(&w, &Function::from(AnalyticFunction::constant(c(1.0)))).unwrap();
    for x in 0..8 {
        let xc = c(x as f64);
        assert!((g.eval(xc).unwrap() - charlier_sum(4, a, xc).unwrap()).norm() < 1e-12);
    }
}

proptest! {
    #[test]
    fn falling_conversion_agrees_pointwise(coeffs in prop::collection::vec(-5i32..=5, 1..8), x in -4i32..12) {
        let f: Vec<C64> = coeffs.iter().map(|&v| c(v as f64)).collect();
        let m = falling_to_monomial(&f);
        let xc = c(x as f64);
        let mut ff = c(1.0);
        let mut want = c(0.0);
        for (k, a) in f.iter().enumerate() {
            want += a * ff;
            ff *= xc - k as f64;
        }
        let got: C64 = m.iter().rev().fold(c(0.0), |acc, a| acc * xc + a);
        prop_assert!((got - want).norm() <= 1e-9 * want.norm().max(1.0));
    }
}

#[test]
fn zero_parameter_rejected() {
    assert!(charlier_symbolic(3, c(0.0)).is_err());
    assert!(charlier_sum(3, c(0.0), c(1.0)).is_err());
    assert!(charlier_rodrigues_oracle(3, c(0.0), 1).is_err());
}
