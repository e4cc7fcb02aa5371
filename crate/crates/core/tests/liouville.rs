use std::f64::consts::PI;

use weylres_core::liouville::{
    classical_liouville_verdict, delta_liouville_verdict, q_liouville_verdict, CheckStatus, LiouvilleParams, Verdict,
};
use weylres_core::{AnalyticFunction, Circle, Function, ModelSemantics, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn two_pow(b: f64) -> Function {
    AnalyticFunction::const_pow(c(b, 0.0)).into()
}

#[test]
fn q_constant_is_consistent() {
    let params = LiouvilleParams {
        k_max: 6,
        ..Default::default()
    };
    let r = q_liouville_verdict(&Function::constant(c(3.0, 0.0)), c(0.5, 0.0), &params).unwrap();
    assert_eq!(r.verdict, Verdict::Consistent);
    for row in &r.coefficients[1..] {
        assert!(row.oracle.norm() <= 1e-8);
        assert!(row.residue.unwrap().norm() <= 1e-8);
    }
    assert!((r.coefficients[0].oracle - 3.0).norm() <= 1e-12);
}

#[test]
fn q_first_basis_function_violates_growth() {
    let s = ModelSemantics::jackson_a(c(0.5, 0.0)).unwrap();
    let phi1 = s.basis().function(1);
    let params = LiouvilleParams {
        k_max: 6,
        ..Default::default()
    };
    let r = q_liouville_verdict(&phi1, c(0.5, 0.0), &params).unwrap();
    assert_eq!(r.verdict, Verdict::HypothesisViolated);
    assert_eq!(r.hypotheses[0].status, CheckStatus::Fail);
    assert!((r.coefficients[1].oracle - 1.0).norm() <= 1e-8);
    assert!((r.coefficients[1].residue.unwrap() - 1.0).norm() <= 1e-8);
}

#[test]
fn classical_exp_is_violated_with_taylor_coefficients() {
    let params = LiouvilleParams {
        k_max: 12,
        circle: Circle::new(1.0, 512).unwrap(),
        ..Default::default()
    };
    let r = classical_liouville_verdict(&AnalyticFunction::var().exp(), &params).unwrap();
    assert_eq!(r.verdict, Verdict::HypothesisViolated);
    let mut fact = 1.0;
    for row in &r.coefficients {
        if row.k > 0 {
            fact *= row.k as f64;
        }
        assert!((row.oracle - 1.0 / fact).norm() <= 1e-10);
        assert!((row.residue.unwrap() - 1.0 / fact).norm() <= 1e-10);
    }
}

#[test]
fn delta_controls() {
    let params = LiouvilleParams::default();
    let one = Function::constant(c(1.0, 0.0));

    let r = delta_liouville_verdict(&two_pow(2.0), &one, &params).unwrap();
    assert_eq!(r.verdict, Verdict::HypothesisViolated);

    let r = delta_liouville_verdict(&two_pow(0.5), &one, &params).unwrap();
    assert_eq!(r.verdict, Verdict::DiscrepancyRecorded);
    assert!(r.hypotheses.iter().all(|h| h.status == CheckStatus::Pass));
    let mut fact = 1.0;
    for row in &r.coefficients {
        if row.k > 0 {
            fact *= row.k as f64;
        }
        let want = (-0.5f64).powi(row.k as i32) / fact;
        assert!((row.oracle - want).norm() <= 1e-10, "k={}", row.k);
        assert!(row.residue.is_some());
    }
    assert!(r.calibration.is_some());
    assert!(!r.bound_checks.is_empty());
    assert!(r.bound_checks.iter().all(|b| b.holds));
    assert!(r.growth.is_some());
    assert!(r.residue_experimental);
}

#[test]
fn delta_rejects_non_periodic_generator() {
    let p: Function = AnalyticFunction::var().into();
    assert!(delta_liouville_verdict(&p, &p, &LiouvilleParams::default()).is_err());
}

#[test]
fn delta_with_periodic_generator() {
    let p: Function = AnalyticFunction::var().scale(c(0.0, 2.0 * PI)).exp().into();
    let f: Function = AnalyticFunction::var()
        .scale(c(0.0, 2.0 * PI))
        .exp()
        .mul(&AnalyticFunction::const_pow(c(0.5, 0.0)))
        .into();
    let r = delta_liouville_verdict(&f, &p, &LiouvilleParams::default()).unwrap();
    // f/p = 2^{-t}, the same coefficients as with p = 1.
    assert!((r.coefficients[1].oracle - (-0.5)).norm() <= 1e-10);
}
